// DTOs mirrored from the planning service API (docs/api.md).

export interface Pt {
  x: number;
  y: number;
}

export interface Seg {
  a: Pt;
  b: Pt;
}

export interface PoseDto {
  rotation_deg: number;
  pivot: Pt;
  dx: number;
  dy: number;
}

export interface ImplantDto {
  brand: string;
  side: 'left' | 'right';
  size_mm: number;
}

export interface PlacementDto {
  implant: ImplantDto;
  pose: PoseDto;
  anchor: Pt;
  outline_px: [number, number][];
}

export interface SizingResponse {
  measured_mm: number;
  size_mm: number;
  placement: PlacementDto;
}

export interface ApiErrorBody {
  code: string;
  message: string;
  detail?: {
    rejected_reason?: 'below_min' | 'above_max';
    measured_mm?: number;
  };
}

/** Incremental pose edit: rotate about pivot, then translate. */
export interface Delta {
  rotation_deg: number;
  pivot: Pt;
  dx: number;
  dy: number;
}

export interface PlanPayload {
  patient_name: string;
  gender: 'M' | 'F';
  patient_id: string;
  dob: string;
}

export interface PlanDto extends PlanPayload {
  plan_id: string;
  acetabular_size: number;
  acetabular_brand: string;
  measurement: { ax: number; ay: number; bx: number; by: number };
  calibration: { mm_per_px: number };
  placement: {
    implant: ImplantDto;
    pose: PoseDto;
    anchor: Pt;
  };
}

export interface SessionStateDto {
  session_id: string;
  media_type: string;
  calibration: { mm_per_px: number } | null;
  measurement: { ax: number; ay: number; bx: number; by: number } | null;
  sizing: { measured_mm: number; size_mm: number } | null;
  placement: PlacementDto | null;
}

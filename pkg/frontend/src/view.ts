import type { Pt } from './types';

/** Screen = image * zoom + pan. Pointer coordinates pass through this
 * before anything is sent to the server, so submitted segments are
 * always in image space regardless of the current view. */
export interface View {
  zoom: number;
  panX: number;
  panY: number;
}

export const defaultView = (): View => ({ zoom: 1, panX: 0, panY: 0 });

export function screenToImage(view: View, sx: number, sy: number): Pt {
  return { x: (sx - view.panX) / view.zoom, y: (sy - view.panY) / view.zoom };
}

export function imageToScreen(view: View, ix: number, iy: number): Pt {
  return { x: ix * view.zoom + view.panX, y: iy * view.zoom + view.panY };
}

/** Zoom keeping the given screen point fixed (wheel zoom UX). */
export function zoomAt(view: View, sx: number, sy: number, factor: number): View {
  const zoom = Math.min(16, Math.max(0.125, view.zoom * factor));
  const eff = zoom / view.zoom;
  return {
    zoom,
    panX: sx - (sx - view.panX) * eff,
    panY: sy - (sy - view.panY) * eff,
  };
}

export function panBy(view: View, dxScreen: number, dyScreen: number): View {
  return { ...view, panX: view.panX + dxScreen, panY: view.panY + dyScreen };
}

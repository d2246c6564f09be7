// View filters: pure rendering preferences, never touching server data.
// Empty sets mean "show all".

export interface FilterState {
  byParticipant: Set<string>;
  byStructure: Set<string>;
  showVolumes: boolean;
  showGuides: boolean;
}

export function emptyFilter(): FilterState {
  return {
    byParticipant: new Set(),
    byStructure: new Set(),
    showVolumes: true,
    showGuides: true,
  };
}

export function contourVisible(f: FilterState, authorId: string, structureLabel: string): boolean {
  if (f.byParticipant.size > 0 && !f.byParticipant.has(authorId)) return false;
  if (f.byStructure.size > 0 && !f.byStructure.has(structureLabel)) return false;
  return true;
}

export function volumeVisible(f: FilterState, structureLabel: string): boolean {
  if (!f.showVolumes) return false;
  if (f.byStructure.size > 0 && !f.byStructure.has(structureLabel)) return false;
  return true;
}

/** Payload for a FilterSet envelope; the server echoes it back as an ack. */
export function filterPayload(f: FilterState): Record<string, unknown> {
  return {
    participants: [...f.byParticipant].sort(),
    structures: [...f.byStructure].sort(),
    show_volumes: f.showVolumes,
    show_guides: f.showGuides,
  };
}

export function filterFromPayload(p: Record<string, unknown>): FilterState {
  const f = emptyFilter();
  if (Array.isArray(p.participants)) {
    for (const id of p.participants) if (typeof id === "string") f.byParticipant.add(id);
  }
  if (Array.isArray(p.structures)) {
    for (const s of p.structures) if (typeof s === "string") f.byStructure.add(s);
  }
  if (typeof p.show_volumes === "boolean") f.showVolumes = p.show_volumes;
  if (typeof p.show_guides === "boolean") f.showGuides = p.show_guides;
  return f;
}

// Client-side session state: the render model fed by one Snapshot and the
// envelope stream. Rebuilding from a fresh snapshot alone must produce the
// same model, which is what makes reconnects safe.

import type { Envelope } from "./wire.js";

export interface ParticipantInfo {
  participantId: string;
  displayName: string;
  color: string;
  colorIndex: number;
  deviceClass: string;
  teacher: boolean;
}

export interface ContourInfo {
  contourId: string;
  authorId: string;
  color: string;
  structureLabel: string;
  doc: Record<string, unknown>;
}

export interface MeshInfo {
  version: string;
  stats: Record<string, unknown> | null;
}

export interface GradeInfo {
  graderId: string;
  authorId: string;
  structureLabel: string;
  stars: number;
}

export interface FocusMarker {
  participantId: string;
  color: string;
  sliceIndex: number;
}

// Contours from authors no longer present keep a neutral color.
export const DEPARTED_COLOR = "#888888";

function str(v: unknown, fallback = ""): string {
  return typeof v === "string" ? v : fallback;
}

function asRecord(v: unknown): Record<string, unknown> {
  return typeof v === "object" && v !== null && !Array.isArray(v)
    ? (v as Record<string, unknown>)
    : {};
}

export class ClientState {
  sessionId = "";
  datasetId = "";
  participants = new Map<string, ParticipantInfo>();
  memberGroup = new Map<string, string>();
  sliceFocus = new Map<string, number>();
  contours = new Map<string, ContourInfo[]>(); // by structure label
  meshes = new Map<string, MeshInfo>();
  grades: GradeInfo[] = [];

  colorOf(participantId: string): string {
    return this.participants.get(participantId)?.color ?? DEPARTED_COLOR;
  }

  groupOf(participantId: string): string | undefined {
    return this.memberGroup.get(participantId);
  }

  focusMarkers(): FocusMarker[] {
    const out: FocusMarker[] = [];
    for (const [pid, sliceIndex] of this.sliceFocus) {
      const p = this.participants.get(pid);
      if (p === undefined) continue; // markers only for present participants
      out.push({ participantId: pid, color: p.color, sliceIndex });
    }
    return out.sort((a, b) => a.participantId.localeCompare(b.participantId));
  }

  allContours(): ContourInfo[] {
    const out: ContourInfo[] = [];
    for (const label of [...this.contours.keys()].sort()) {
      out.push(...this.contours.get(label)!);
    }
    return out;
  }

  applySnapshot(doc: Record<string, unknown>): void {
    this.sessionId = str(doc.session_id);
    this.datasetId = str(doc.dataset_id);
    this.participants.clear();
    this.memberGroup.clear();
    this.sliceFocus.clear();
    this.contours.clear();
    this.meshes.clear();
    this.grades = [];

    for (const [pid, raw] of Object.entries(asRecord(doc.participants))) {
      this.addParticipant(pid, asRecord(raw));
    }
    for (const [pid, gid] of Object.entries(asRecord(doc.member_group))) {
      if (typeof gid === "string") this.memberGroup.set(pid, gid);
    }
    for (const [pid, idx] of Object.entries(asRecord(doc.slice_focus))) {
      if (typeof idx === "number") this.sliceFocus.set(pid, idx);
    }
    for (const [label, raw] of Object.entries(asRecord(doc.structures))) {
      const s = asRecord(raw);
      const list: ContourInfo[] = [];
      if (Array.isArray(s.contours)) {
        for (const entry of s.contours) {
          const e = asRecord(entry);
          const cdoc = asRecord(e.contour);
          const author = str(cdoc.author);
          list.push({
            contourId: str(e.contour_id),
            authorId: author,
            color: this.colorOf(author),
            structureLabel: label,
            doc: cdoc,
          });
        }
      }
      this.contours.set(label, list);
      const version = s.mesh_version;
      if (typeof version === "string" && version.length > 0) {
        this.meshes.set(label, {
          version,
          stats: s.mesh_stats ? asRecord(s.mesh_stats) : null,
        });
      }
    }
    if (Array.isArray(doc.grades)) {
      for (const raw of doc.grades) {
        const g = asRecord(raw);
        if (typeof g.stars !== "number") continue;
        this.grades.push({
          graderId: str(g.grader_id),
          authorId: str(g.author_id),
          structureLabel: str(g.structure_label),
          stars: g.stars,
        });
      }
    }
  }

  /** Apply one inbound envelope; returns true when the model changed. */
  applyEnvelope(env: Envelope): boolean {
    const p = env.payload;
    switch (env.type) {
      case "Snapshot":
        this.applySnapshot(p);
        return true;
      case "JoinSession": {
        const info = asRecord(p.participant);
        const pid = str(info.participant_id);
        if (pid === "") return false;
        this.addParticipant(pid, info);
        const gid = p.group_id;
        if (typeof gid === "string") this.memberGroup.set(pid, gid);
        return true;
      }
      case "LeaveSession": {
        const pid = str(p.participant_id);
        this.participants.delete(pid);
        this.memberGroup.delete(pid);
        this.sliceFocus.delete(pid);
        return true;
      }
      case "JoinGroup": {
        const pid = str(p.participant_id);
        const gid = str(p.group_id);
        if (pid === "" || gid === "") return false;
        this.memberGroup.set(pid, gid);
        return true;
      }
      case "SliceFocus": {
        const pid = str(p.participant_id);
        if (pid === "" || typeof p.slice_index !== "number") return false;
        this.sliceFocus.set(pid, p.slice_index);
        return true;
      }
      case "ContourCommit": {
        const label = str(p.structure_label);
        if (label === "") return false;
        const list = this.contours.get(label) ?? [];
        list.push({
          contourId: str(p.contour_id),
          authorId: str(p.author_id),
          color: str(p.color, this.colorOf(str(p.author_id))),
          structureLabel: label,
          doc: asRecord(p.contour),
        });
        this.contours.set(label, list);
        return true;
      }
      case "MeshRebuilt": {
        const label = str(p.structure_label);
        if (label === "") return false;
        this.meshes.set(label, {
          version: str(p.version),
          stats: p.stats ? asRecord(p.stats) : null,
        });
        return true;
      }
      case "GradeSubmit": {
        if (typeof p.stars !== "number") return false;
        const next: GradeInfo = {
          graderId: str(p.grader_id),
          authorId: str(p.author_id),
          structureLabel: str(p.structure_label),
          stars: p.stars,
        };
        const i = this.grades.findIndex(
          (g) =>
            g.graderId === next.graderId &&
            g.authorId === next.authorId &&
            g.structureLabel === next.structureLabel,
        );
        if (i >= 0) this.grades[i] = next;
        else this.grades.push(next);
        return true;
      }
      default:
        return false; // strokes, poses, acks and errors carry no session state
    }
  }

  private addParticipant(pid: string, raw: Record<string, unknown>): void {
    this.participants.set(pid, {
      participantId: pid,
      displayName: str(raw.display_name, pid),
      color: str(raw.color, DEPARTED_COLOR),
      colorIndex: typeof raw.color_index === "number" ? raw.color_index : -1,
      deviceClass: str(raw.device_class, "desktop"),
      teacher: raw.teacher === true,
    });
    // colors may arrive after contours on a reconnect replay
    for (const list of this.contours.values()) {
      for (const c of list) {
        if (c.authorId === pid) c.color = this.colorOf(pid);
      }
    }
  }
}

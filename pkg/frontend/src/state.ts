/** Client-side state: plan-pair selection and pending config edits. */

import type { ConfigEdit } from "./api";

/**
 * Exactly zero or two plans are selected; picking a third replaces the
 * older of the pair. The older selection is the "last" plan (A), the newer
 * one the "current" plan (B).
 */
export class SelectionState {
  private ids: string[] = [];

  select(id: string): void {
    if (this.ids.includes(id)) {
      this.ids = this.ids.filter((x) => x !== id);
      return;
    }
    this.ids.push(id);
    if (this.ids.length === 1) return;
    if (this.ids.length > 2) this.ids = this.ids.slice(-2);
  }

  clear(): void {
    this.ids = [];
  }

  drop(id: string): void {
    this.ids = this.ids.filter((x) => x !== id);
  }

  get pair(): [string, string] | null {
    return this.ids.length === 2 ? [this.ids[0], this.ids[1]] : null;
  }

  get selected(): string[] {
    return [...this.ids];
  }

  isSelected(id: string): boolean {
    return this.ids.includes(id);
  }
}

function editKey(edit: ConfigEdit): string {
  switch (edit.kind) {
    case "set_demand_point":
      return `demand:${edit.product}:${edit.day}`;
    case "set_initial_inventory":
      return `inventory:${edit.product}`;
    case "set_capacity_point":
      return `capacity:${edit.capacity_set}:${edit.day}`;
    case "toggle_holiday":
      return `holiday:${edit.factory}:${edit.day}`;
    case "remove_fixed_constraint":
      return `fixed:${edit.component}`;
    case "scale_capacity":
      return `scale:${edit.capacity_set}:${edit.percent}:${edit.day_range ?? "all"}`;
  }
}

/**
 * Edits accumulate locally and submit atomically on Run. Point edits on the
 * same target replace each other; toggling the same holiday twice cancels
 * out entirely; removing the same constraint twice collapses to once.
 */
export class EditBuffer {
  private edits: ConfigEdit[] = [];

  push(edit: ConfigEdit): void {
    const key = editKey(edit);
    if (edit.kind === "toggle_holiday") {
      const existing = this.edits.findIndex((e) => editKey(e) === key);
      if (existing >= 0) {
        this.edits.splice(existing, 1);
        return;
      }
      this.edits.push(edit);
      return;
    }
    if (edit.kind === "scale_capacity") {
      this.edits.push(edit);
      return;
    }
    this.edits = this.edits.filter((e) => editKey(e) !== key);
    this.edits.push(edit);
  }

  get pending(): ConfigEdit[] {
    return [...this.edits];
  }

  get size(): number {
    return this.edits.length;
  }

  clear(): void {
    this.edits = [];
  }
}

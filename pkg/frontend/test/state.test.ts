import { describe, expect, it } from "vitest";
import { EditBuffer, SelectionState } from "../src/state";

describe("SelectionState", () => {
  it("keeps exactly zero or two selections; a third replaces the older", () => {
    const s = new SelectionState();
    expect(s.pair).toBeNull();
    s.select("a");
    expect(s.pair).toBeNull();
    s.select("b");
    expect(s.pair).toEqual(["a", "b"]);
    s.select("c");
    expect(s.pair).toEqual(["b", "c"]);
  });

  it("clicking a selected plan deselects it", () => {
    const s = new SelectionState();
    s.select("a");
    s.select("b");
    s.select("a");
    expect(s.pair).toBeNull();
    expect(s.selected).toEqual(["b"]);
  });

  it("drop removes a deleted plan from the pair", () => {
    const s = new SelectionState();
    s.select("a");
    s.select("b");
    s.drop("a");
    expect(s.pair).toBeNull();
  });
});

describe("EditBuffer", () => {
  it("records a demand drag as a set_demand_point edit", () => {
    const buffer = new EditBuffer();
    buffer.push({ kind: "set_demand_point", product: "p", day: 3, value: 9 });
    expect(buffer.pending).toEqual([
      { kind: "set_demand_point", product: "p", day: 3, value: 9 },
    ]);
  });

  it("later point edits on the same target replace earlier ones", () => {
    const buffer = new EditBuffer();
    buffer.push({ kind: "set_demand_point", product: "p", day: 3, value: 5 });
    buffer.push({ kind: "set_demand_point", product: "p", day: 3, value: 9 });
    buffer.push({ kind: "set_demand_point", product: "p", day: 4, value: 2 });
    expect(buffer.size).toBe(2);
    expect(buffer.pending[0]).toMatchObject({ day: 3, value: 9 });
  });

  it("toggling the same holiday twice submits nothing", () => {
    const buffer = new EditBuffer();
    buffer.push({ kind: "toggle_holiday", factory: "f1", day: 2 });
    buffer.push({ kind: "toggle_holiday", factory: "f1", day: 2 });
    expect(buffer.pending).toEqual([]);
    buffer.push({ kind: "toggle_holiday", factory: "f1", day: 2 });
    buffer.push({ kind: "toggle_holiday", factory: "f1", day: 3 });
    expect(buffer.size).toBe(2);
  });

  it("clears after Run", () => {
    const buffer = new EditBuffer();
    buffer.push({ kind: "set_initial_inventory", product: "chip", value: 8000 });
    buffer.clear();
    expect(buffer.size).toBe(0);
  });
});

import { describe, expect, it } from "vitest";

import { ApiClient } from "../src/api.js";
import { ExplorerController, RenderModel, Scheduler } from "../src/controller.js";
import { meta, mockService } from "./mockService.js";

function makeController(svc = mockService()) {
  const models: RenderModel[] = [];
  const timers: Array<() => void> = [];
  const schedule: Scheduler = (fn) => {
    timers.push(fn);
    return () => {
      const at = timers.indexOf(fn);
      if (at >= 0) timers.splice(at, 1);
    };
  };
  const controller = new ExplorerController(new ApiClient("", svc.fetch), {
    schedule,
    onRender: (m) => models.push(m),
  });
  const flushTimers = () => {
    const due = timers.splice(0);
    for (const fn of due) fn();
  };
  return { controller, models, svc, flushTimers };
}

describe("explorer controller", () => {
  it("loads the skeleton and focuses the root", async () => {
    const { controller, models } = makeController();
    await controller.init("");
    expect(controller.state.focus).toBe("s0");
    const model = models.at(-1)!;
    expect(model.hierarchy).not.toBeNull();
    expect(model.breadcrumbs).toEqual(["s0"]);
  });

  it("overlays external edges straight from the payload", async () => {
    const { controller, models } = makeController();
    await controller.init("");
    await controller.expandLeaf(meta.leaf);
    await controller.highlightGnc(meta.gnc_node);
    const model = models.at(-1)!;
    expect(model.leaf?.overlay?.count).toBe(model.leaf?.overlay?.edges.length);
    expect(model.leaf?.overlay?.node).toBe(meta.gnc_node);
  });

  it("notices nodes without external connections", async () => {
    const { controller, models } = makeController();
    await controller.init("");
    await controller.expandLeaf(meta.leaf);
    const isolated = 399_999;   // mock returns an empty edge list for it
    await controller.highlightGnc(isolated);
    expect(models.at(-1)!.notice).toContain("no external connections");
  });

  it("label search navigates to the containing community", async () => {
    const { controller } = makeController();
    await controller.init("");
    const hit = await controller.searchLabel(meta.label);
    expect(controller.state.loadedLeaves).toContain(hit.leaf);
    expect(controller.state.focus).toBe(hit.ancestor_path[0]);
    expect(controller.highlighted).toBe(hit.node);
  });

  it("selection toggles only nodes of the open leaf", async () => {
    const { controller } = makeController();
    await controller.init("");
    await controller.expandLeaf(meta.leaf);
    controller.toggleSelect(meta.queries[0]);
    controller.toggleSelect(999_999);          // not a member: ignored
    expect(controller.state.selection).toEqual([meta.queries[0]]);
    controller.toggleSelect(meta.queries[0]);
    expect(controller.state.selection).toEqual([]);
  });

  it("discards stale summaries when responses arrive out of order", async () => {
    const svc = mockService();
    const { controller } = makeController(svc);
    await controller.init("");
    await controller.expandLeaf(meta.leaf);
    for (const q of meta.queries) controller.toggleSelect(q);

    const release40 = svc.delayCeps(40);
    controller.state.budget = 40;
    const slow = controller.runSummary();      // b=40, will resolve last
    controller.state.budget = 10;
    await controller.runSummary();             // b=10 applies first
    expect(controller.summary?.params.budget).toBe(10);
    release40();
    await slow;                                 // stale: must not overwrite
    expect(controller.summary?.params.budget).toBe(10);
  });

  it("debounces the budget slider", async () => {
    const svc = mockService();
    const { controller, flushTimers } = makeController(svc);
    await controller.init("");
    await controller.expandLeaf(meta.leaf);
    for (const q of meta.queries) controller.toggleSelect(q);
    controller.setBudget(40);
    controller.setBudget(10);   // cancels the pending b=40 run
    expect(svc.calls["/ceps b=40"]).toBeUndefined();
    flushTimers();
    await Promise.resolve();    // let the scheduled runSummary start
    await new Promise((r) => setTimeout(r, 0));
    expect(svc.calls["/ceps b=40"]).toBeUndefined();
    expect(svc.calls["/ceps b=10"]).toBe(1);
  });
});

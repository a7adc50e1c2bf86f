import { describe, expect, it } from "vitest";

import { ViewState } from "../src/state.js";
import type { PaintingBaseline, PaintingSdm } from "../src/types.js";
import {
  renderPaintingDetail, renderPaintingGrid, renderRetryBanner,
} from "../src/views.js";

const BASELINE: PaintingBaseline = {
  id: "p001",
  title: "千里江山图",
  image_ref: "images/p001.jpg",
  description: "青绿山水长卷。",
  keywords: ["山水", "青绿"],
  era: "宋",
};

const SDM: PaintingSdm = {
  ...BASELINE,
  subjects: [
    {
      subject_id: "pe.nature.landscape",
      label: "山水",
      path: ["前图像志元素", "物象", "山水"],
      element_kind: "PE",
      terms: ["山水", "江河", "云雾"],
    },
  ],
  unmapped: ["孤词"],
};

describe("painting views", () => {
  it("baseline detail shows museum fields and no term panel", () => {
    const html = renderPaintingDetail(BASELINE);
    expect(html).toContain("千里江山图");
    expect(html).toContain("宋");
    expect(html).toContain("青绿山水长卷。");
    expect(html).not.toContain("sdm-panel");
    expect(html).not.toContain("unmapped");
  });

  it("sdm detail keeps museum fields and adds subjects plus unmapped tray", () => {
    const html = renderPaintingDetail(SDM);
    expect(html).toContain("千里江山图"); // museum fields unchanged
    expect(html).toContain("sdm-panel");
    expect(html).toContain("前图像志元素 / 物象 / 山水");
    expect(html).toContain('data-term="江河"');
    expect(html).toContain("unmapped-tray");
    expect(html).toContain("孤词");
  });

  it("empty corpus renders the empty state", () => {
    expect(renderPaintingGrid([])).toContain("No paintings available");
  });

  it("grid renders one card per painting", () => {
    const html = renderPaintingGrid([BASELINE, { ...BASELINE, id: "p002" }]);
    expect(html.match(/painting-card/g)).toHaveLength(2);
  });

  it("retry banner carries the message and a retry control", () => {
    const html = renderRetryBanner("service unreachable");
    expect(html).toContain("service unreachable");
    expect(html).toContain('data-action="retry"');
  });

  it("escapes markup in server-provided strings", () => {
    const hostile = { ...BASELINE, title: '<img src=x onerror="x">' };
    const html = renderPaintingDetail(hostile);
    expect(html).not.toContain("<img src=x");
    expect(html).toContain("&lt;img src=x");
  });
});

describe("view state", () => {
  it("condition toggle flips the fetch view", () => {
    const state = new ViewState();
    expect(state.view).toBe("sdm");
    state.toggleCondition();
    expect(state.condition).toBe("BASELINE");
    expect(state.view).toBe("baseline");
  });

  it("version observation flags staleness only on later versions", () => {
    const state = new ViewState();
    expect(state.observeVersion(1)).toBe(false); // first observation
    expect(state.observeVersion(1)).toBe(false);
    expect(state.observeVersion(3)).toBe(true);
    expect(state.modelVersion).toBe(3);
  });
});

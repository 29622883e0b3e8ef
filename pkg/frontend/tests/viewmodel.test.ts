import { describe, expect, it } from "vitest";
import { readFileSync } from "node:fs";
import { join } from "node:path";

import {
  chartSeries,
  neighborLabel,
  paramRows,
  projectView,
  promptSegments,
} from "../src/viewmodel.js";
import { RecommendResponse, CardsResponse } from "../src/schema.js";

const fixture = <T>(name: string): T =>
  JSON.parse(readFileSync(join(__dirname, "fixtures", name), "utf-8")) as T;

const recommendResponse = fixture<RecommendResponse>("recommend_response.json");
const cardsResponse = fixture<CardsResponse>("cards_response.json");

describe("projectView on a recommend response", () => {
  const projection = projectView("abc123", cardsResponse.prompt, recommendResponse);

  it("projects without drift", () => {
    expect(projection.kind).toBe("view");
  });

  it("keeps a 12-point chart series", () => {
    if (projection.kind !== "view") throw new Error("drift");
    expect(projection.chart?.epochs).toHaveLength(12);
    expect(projection.chart?.valMetric).toHaveLength(12);
    // values are copied verbatim from the response, never recomputed
    expect(projection.chart?.valMetric[11]).toBe(
      recommendResponse.predicted_log.entries[11].val_metric,
    );
  });

  it('labels neighbor weights "A 60% / B 40%"', () => {
    if (projection.kind !== "view") throw new Error("drift");
    expect(projection.neighborLabel).toBe("A 60% / B 40%");
  });

  it("builds a parameter table row per config entry", () => {
    if (projection.kind !== "view") throw new Error("drift");
    const names = projection.paramRows.map((r) => r.name);
    expect(names).toEqual(["epochs", "learning_rate"]);
  });

  it("is lossless: the raw response rides along", () => {
    if (projection.kind !== "view") throw new Error("drift");
    expect(projection.raw).toBe(recommendResponse);
  });
});

describe("prompt span mapping", () => {
  it("reassembles the prompt text exactly from segments", () => {
    const segments = promptSegments(cardsResponse.prompt);
    expect(segments.map((s) => s.text).join("")).toBe(cardsResponse.prompt.text);
  });

  it("marks card fields with their field paths", () => {
    const segments = promptSegments(cardsResponse.prompt);
    const marked = segments.filter((s) => s.fieldPath !== null);
    expect(marked.map((s) => s.fieldPath)).toContain("data.name");
    const nameSegment = marked.find((s) => s.fieldPath === "data.name");
    expect(nameSegment?.text).toBe("New");
  });
});

describe("schema drift", () => {
  it("flags unknown response shapes without crashing", () => {
    const projection = projectView("abc123", null, { surprise: true });
    expect(projection.kind).toBe("schema_drift");
    if (projection.kind === "schema_drift") {
      expect(projection.raw).toEqual({ surprise: true });
    }
  });

  it("flags a response with a mangled log", () => {
    const mangled = JSON.parse(JSON.stringify(recommendResponse));
    mangled.predicted_log = { entries: [{ epoch: "one" }] };
    expect(projectView("abc123", null, mangled).kind).toBe("schema_drift");
  });
});

describe("helpers", () => {
  it("rounds neighbor percentages", () => {
    expect(
      neighborLabel({
        config: {},
        source: "transfer",
        rationale: "",
        neighbors: [
          { dataset: "A", weight: 0.6 },
          { dataset: "B", weight: 0.39999999999999997 },
        ],
      }),
    ).toBe("A 60% / B 40%");
  });

  it("formats config values compactly", () => {
    const rows = paramRows({
      config: { learning_rate: 3.9810717055349695e-5, epochs: 70 },
      source: "transfer",
      rationale: "",
      neighbors: [],
    });
    expect(rows).toEqual([
      { name: "epochs", value: "70" },
      { name: "learning_rate", value: "3.9811e-5" },
    ]);
  });

  it("chartSeries copies entries in order", () => {
    const series = chartSeries(recommendResponse.predicted_log);
    expect(series.epochs).toEqual(
      recommendResponse.predicted_log.entries.map((e) => e.epoch),
    );
  });
});

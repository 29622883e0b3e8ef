/**
 * Inline SVG line chart for training-log curves.
 *
 * The only arithmetic here is coordinate scaling; every plotted value
 * comes straight from the response.
 */

import { ChartSeries } from "./viewmodel.js";

const WIDTH = 560;
const HEIGHT = 240;
const PAD = 32;

function scaleX(epoch: number, minEpoch: number, maxEpoch: number): number {
  const span = Math.max(maxEpoch - minEpoch, 1);
  return PAD + ((epoch - minEpoch) / span) * (WIDTH - 2 * PAD);
}

function scaleY(value: number, minV: number, maxV: number): number {
  const span = Math.max(maxV - minV, 1e-9);
  return HEIGHT - PAD - ((value - minV) / span) * (HEIGHT - 2 * PAD);
}

export function polylinePoints(
  epochs: number[],
  values: number[],
  minV: number,
  maxV: number,
): string {
  const minEpoch = epochs[0];
  const maxEpoch = epochs[epochs.length - 1];
  return epochs
    .map((epoch, i) =>
      `${scaleX(epoch, minEpoch, maxEpoch).toFixed(1)},` +
      `${scaleY(values[i], minV, maxV).toFixed(1)}`)
    .join(" ");
}

export function renderChartSvg(series: ChartSeries): string {
  if (series.epochs.length === 0) return "";
  const all = [...series.trainLoss, ...series.valLoss, ...series.valMetric];
  const minV = Math.min(0, ...all);
  const maxV = Math.max(1, ...all);
  const lines = [
    { values: series.trainLoss, cls: "train-loss", label: "train_loss" },
    { values: series.valLoss, cls: "val-loss", label: "val_loss" },
    { values: series.valMetric, cls: "val-metric", label: "val_metric" },
  ];
  const polylines = lines
    .map(
      (line) =>
        `<polyline class="${line.cls}" fill="none" points="` +
        `${polylinePoints(series.epochs, line.values, minV, maxV)}"/>`,
    )
    .join("");
  const markers = series.epochs
    .map((epoch, i) => {
      const x = scaleX(epoch, series.epochs[0],
        series.epochs[series.epochs.length - 1]);
      const y = scaleY(series.valMetric[i], minV, maxV);
      return `<circle class="pt" cx="${x.toFixed(1)}" cy="${y.toFixed(1)}" r="2.5"/>`;
    })
    .join("");
  const legend =
    `<text x="${PAD}" y="16" class="legend">` +
    lines.map((l) => l.label).join("  /  ") +
    `</text>`;
  return (
    `<svg viewBox="0 0 ${WIDTH} ${HEIGHT}" role="img" ` +
    `aria-label="predicted training log">` +
    `${legend}${polylines}${markers}</svg>`
  );
}

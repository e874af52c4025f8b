import type { ReportDto } from "./types.js";

export const DISPLAY_DECIMALS = 4;

export interface MetricSeries {
  name: string;
  slices: number[];
  values: number[];
}

export interface AggregateCard {
  name: string;
  mean: number;
  std: number;
  /** e.g. "0.8570±0.0290" — exactly what the card shows */
  text: string;
}

export interface DashboardView {
  series: MetricSeries[];
  cards: AggregateCard[];
  sampleCount: number;
}

export function formatMetric(value: number, decimals = DISPLAY_DECIMALS): string {
  return value.toFixed(decimals);
}

/**
 * Shape a mode-C report for rendering. Values pass through untouched except
 * for display formatting, so the dashboard always equals the report to the
 * displayed precision.
 */
export function dashboardView(report: ReportDto): DashboardView {
  const names = ["accuracy", "iou", "dice"] as const;
  const series: MetricSeries[] = names.map((name) => ({
    name,
    slices: report.per_slice.map((m) => m.slice),
    values: report.per_slice.map((m) => m[name]),
  }));
  const cards: AggregateCard[] = names.map((name) => {
    const agg = report.aggregate[name];
    return {
      name,
      mean: agg.mean,
      std: agg.std,
      text: `${formatMetric(agg.mean)}±${formatMetric(agg.std)}`,
    };
  });
  return { series, cards, sampleCount: report.sample_count };
}

/** Simple polyline for an SVG chart: x spread over the width, y in [0,1]. */
export function seriesToPolyline(
  series: MetricSeries,
  width: number,
  height: number,
  pad = 4,
): string {
  const n = series.values.length;
  if (n === 0) return "";
  const innerW = width - 2 * pad;
  const innerH = height - 2 * pad;
  const points = series.values.map((v, i) => {
    const x = pad + (n === 1 ? innerW / 2 : (i / (n - 1)) * innerW);
    const y = pad + (1 - Math.min(Math.max(v, 0), 1)) * innerH;
    return `${x.toFixed(1)},${y.toFixed(1)}`;
  });
  return points.join(" ");
}

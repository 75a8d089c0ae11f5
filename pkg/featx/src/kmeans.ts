/** Plain k-means with deterministic seeded initialization (farthest-point
 * after a seeded start), fixed iteration cap. Clusters never exceed the
 * number of points.
 */

import { Rng, mulberry32, randInt } from "./rng.js";

function squaredDistance(a: number[], b: number[]): number {
  let acc = 0;
  for (let i = 0; i < a.length; i++) {
    const d = a[i]! - b[i]!;
    acc += d * d;
  }
  return acc;
}

export interface KmeansResult {
  centroids: number[][];
  assignments: number[];
}

export function kmeans(points: number[][], k: number, seed: number,
                       maxIterations = 25): KmeansResult {
  if (points.length === 0) throw new Error("kmeans needs at least one point");
  k = Math.min(k, points.length);
  const rng: Rng = mulberry32(seed);
  const width = points[0]!.length;

  const centroidIdx = [randInt(rng, points.length)];
  while (centroidIdx.length < k) {
    let farthest = -1;
    let farthestDist = -1;
    for (let p = 0; p < points.length; p++) {
      const nearest = Math.min(
        ...centroidIdx.map((c) => squaredDistance(points[p]!, points[c]!))
      );
      if (nearest > farthestDist) {
        farthestDist = nearest;
        farthest = p;
      }
    }
    centroidIdx.push(farthest);
  }
  let centroids = centroidIdx.map((i) => [...points[i]!]);

  let assignments = new Array<number>(points.length).fill(0);
  for (let iter = 0; iter < maxIterations; iter++) {
    const next = points.map((p) => {
      let best = 0;
      let bestDist = Infinity;
      for (let c = 0; c < centroids.length; c++) {
        const dist = squaredDistance(p, centroids[c]!);
        if (dist < bestDist) {
          bestDist = dist;
          best = c;
        }
      }
      return best;
    });
    const changed = next.some((c, i) => c !== assignments[i]);
    assignments = next;
    const sums = centroids.map(() => new Array<number>(width).fill(0));
    const counts = centroids.map(() => 0);
    for (let p = 0; p < points.length; p++) {
      const c = assignments[p]!;
      counts[c] += 1;
      for (let i = 0; i < width; i++) sums[c]![i] += points[p]![i]!;
    }
    centroids = centroids.map((old, c) =>
      counts[c]! > 0 ? sums[c]!.map((v) => v / counts[c]!) : old
    );
    if (!changed && iter > 0) break;
  }
  return { centroids, assignments };
}

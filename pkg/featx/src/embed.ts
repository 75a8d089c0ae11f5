/** Deterministic text embedder: signed token feature hashing into a fixed
 * width, with unigram + bigram features, L2-normalized. A self-contained,
 * byte-stable stand-in for a pretrained sentence encoder.
 */

import { createHash } from "node:crypto";

import { removeStopwords, tokenize } from "./text.js";

function hashFeature(feature: string): { index: number; sign: number } {
  const digest = createHash("sha256").update(feature).digest();
  const index = digest.readUInt32BE(0);
  const sign = (digest[4]! & 1) === 0 ? 1 : -1;
  return { index, sign };
}

export function embedText(text: string, width: number): number[] {
  const vec = new Array<number>(width).fill(0);
  const tokens = removeStopwords(tokenize(text));
  const features: string[] = [...tokens];
  for (let i = 0; i + 1 < tokens.length; i++) {
    features.push(`${tokens[i]}_${tokens[i + 1]}`);
  }
  for (const feature of features) {
    const { index, sign } = hashFeature(feature);
    vec[index % width] += sign;
  }
  const norm = Math.sqrt(vec.reduce((acc, v) => acc + v * v, 0));
  if (norm === 0) return vec;
  return vec.map((v) => v / norm);
}

export function cosine(a: number[], b: number[]): number {
  let dot = 0;
  let na = 0;
  let nb = 0;
  for (let i = 0; i < a.length; i++) {
    dot += a[i]! * b[i]!;
    na += a[i]! * a[i]!;
    nb += b[i]! * b[i]!;
  }
  if (na === 0 || nb === 0) return 0;
  return dot / Math.sqrt(na * nb);
}

export function meanVector(vectors: number[][], width: number): number[] {
  const out = new Array<number>(width).fill(0);
  if (vectors.length === 0) return out;
  for (const vec of vectors) {
    for (let i = 0; i < width; i++) out[i] += vec[i]!;
  }
  return out.map((v) => v / vectors.length);
}

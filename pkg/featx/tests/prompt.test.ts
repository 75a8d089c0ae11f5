import { describe, expect, it } from "vitest";

import {
  CANDIDATE_ANSWERS,
  SCALE_ITEMS,
  pickDegree,
  runPromptBackend,
  scoreCandidates,
  truncateToCapacity,
} from "../src/prompt.js";
import { DEFAULT_CONFIG, mergeConfig } from "../src/types.js";

describe("scale definition", () => {
  it("has 20 items each with one mask slot", () => {
    expect(SCALE_ITEMS).toHaveLength(20);
    for (const item of SCALE_ITEMS) {
      expect(item.template.split("[mask]")).toHaveLength(2);
    }
  });

  it("candidate answers are exactly the four frequency words", () => {
    expect([...CANDIDATE_ANSWERS]).toEqual(["Rarely", "Sometimes", "Often", "Always"]);
  });

  it("marks the ten reversed items", () => {
    const reversed = SCALE_ITEMS.filter((i) => i.reversed).map((i) => i.index);
    expect(reversed).toEqual([2, 5, 6, 11, 12, 14, 16, 17, 18, 20]);
  });
});

describe("lexicon backend", () => {
  it("maps the crying-spells fixture to degree >= 3 on item 3", () => {
    const answers = runPromptBackend(
      "I cry every night and cannot sleep", DEFAULT_CONFIG,
    );
    expect(answers[2]).toBeGreaterThanOrEqual(3);
  });

  it("is deterministic on identical input", () => {
    const text = "so tired and exhausted, crying and hopeless for weeks";
    const a = runPromptBackend(text, DEFAULT_CONFIG);
    const b = runPromptBackend(text, DEFAULT_CONFIG);
    expect(a).toEqual(b);
  });

  it("returns Rarely without any evidence", () => {
    const answers = runPromptBackend(
      "completely unrelated words about carpentry", DEFAULT_CONFIG,
    );
    expect(answers.every((a) => a === 1)).toBe(true);
  });

  it("breaks score ties toward the lower degree", () => {
    expect(pickDegree([0, 0, 0, 0])).toBe(1);
    expect(pickDegree([-1, 0, 0, -1])).toBe(2);
  });

  it("produces one answer per item in {1..4}", () => {
    const answers = runPromptBackend(
      "crying tears hopeless tired sleep insomnia", DEFAULT_CONFIG,
    );
    expect(answers).toHaveLength(20);
    for (const a of answers) expect([1, 2, 3, 4]).toContain(a);
  });

  it("truncates over-capacity input from the tail and logs it", () => {
    const logs: string[] = [];
    const text = Array.from({ length: 50 }, (_, i) => `word${i}`).join(" ");
    const tokens = truncateToCapacity(text, 10, (m) => logs.push(m));
    expect(tokens).toHaveLength(10);
    expect(tokens[0]).toBe("word0");
    expect(logs[0]).toContain("truncated");
    const config = mergeConfig({ promptCapacityTokens: 10 });
    const answers = runPromptBackend(text, config, () => {});
    expect(answers).toHaveLength(20);
  });

  it("stronger evidence density raises the degree", () => {
    const weak = scoreCandidates(
      ["cry", ...Array.from({ length: 60 }, () => "filler")],
      SCALE_ITEMS[2]!,
    );
    const strong = scoreCandidates(["cry", "tears", "sobbing", "crying"],
                                   SCALE_ITEMS[2]!);
    expect(pickDegree(strong)).toBeGreaterThan(pickDegree(weak));
    expect(pickDegree(strong)).toBe(4);
  });

  it("rejects an unknown backend id", () => {
    expect(() => runPromptBackend("text", mergeConfig({ promptBackend: "other" })))
      .toThrow(/unknown prompt backend/);
  });
});

import { describe, expect, it } from "vitest";

import { preprocessUser } from "../src/preprocess.js";
import { summarize } from "../src/summarize.js";
import { DEFAULT_CONFIG, mergeConfig } from "../src/types.js";

import { archive, tweet } from "./fixtures.js";

describe("summarize", () => {
  it("a single tweet summarizes to that tweet", () => {
    const user = preprocessUser(archive("u", 0, [
      tweet("One lonely tweet about the sea."),
    ]))!;
    expect(summarize(user, DEFAULT_CONFIG)).toBe("One lonely tweet about the sea.");
  });

  it("compresses near-duplicates to under 10% of the input", () => {
    const tweets = [];
    for (let i = 0; i < 100; i++) {
      tweets.push(tweet(
        `My cat sat on the warm mat again today, variation number ${i}, ` +
        "and it was the same cozy scene as always with tiny differences.",
        `2017-03-01T${String(i % 24).padStart(2, "0")}:00:00Z`));
    }
    const user = preprocessUser(archive("u", 0, tweets))!;
    const summary = summarize(user, DEFAULT_CONFIG);
    const inputLength = user.tweets.map((t) => t.raw).join(" ").length;
    expect(summary.length).toBeLessThan(0.1 * inputLength);
    expect(summary.length).toBeGreaterThan(0);
  });

  it("is deterministic for a fixed seed", () => {
    const tweets = [];
    for (let i = 0; i < 30; i++) {
      tweets.push(tweet(`thought number ${i} about topic ${i % 5} and more words`,
                        `2017-03-01T${String(i % 24).padStart(2, "0")}:00:00Z`));
    }
    const user = preprocessUser(archive("u", 0, tweets))!;
    const config = mergeConfig({ seed: 9 });
    expect(summarize(user, config)).toBe(summarize(user, config));
  });

  it("uses fewer clusters than requested when tweets are scarce", () => {
    const user = preprocessUser(archive("u", 0, [
      tweet("first idea about music."),
      tweet("second idea about painting."),
    ]))!;
    const config = mergeConfig({ summaryClusterCount: 10 });
    const summary = summarize(user, config);
    expect(summary).toContain("first idea");
    expect(summary).toContain("second idea");
  });
});

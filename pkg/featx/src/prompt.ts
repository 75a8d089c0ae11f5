/** Masked-answer backend over the 20-item scale.
 *
 * Backend "lexicon-1": for each item, evidence keywords are counted in the
 * user's full (unsummarized) post text, converted to a length-normalized
 * density, and the four candidate answers are scored by closeness to the
 * density-implied frequency degree. The argmax degree is returned, ties
 * resolved toward the lower degree. Inputs beyond the token capacity are
 * truncated from the tail (chronological head preserved).
 */

import { tokenize } from "./text.js";
import { PipelineConfig } from "./types.js";

export const CANDIDATE_ANSWERS = ["Rarely", "Sometimes", "Often", "Always"] as const;

export interface ScaleItem {
  index: number;
  template: string;
  reversed: boolean;
}

export const SCALE_ITEMS: ScaleItem[] = [
  { index: 1, template: "I [mask] feel down hearted and blue.", reversed: false },
  { index: 2, template: "Morning is when I [mask] feel the best.", reversed: true },
  { index: 3, template: "I [mask] have crying spells or feel like it.", reversed: false },
  { index: 4, template: "I [mask] have trouble sleeping at night.", reversed: false },
  { index: 5, template: "I [mask] eat as much as I used to.", reversed: true },
  { index: 6, template: "I [mask] enjoy sex.", reversed: true },
  { index: 7, template: "I [mask] notice that I am losing weight.", reversed: false },
  { index: 8, template: "I [mask] have trouble with constipation.", reversed: false },
  { index: 9, template: "My heart [mask] beats faster than usual.", reversed: false },
  { index: 10, template: "I [mask] get tired for no reason.", reversed: false },
  { index: 11, template: "My mind is [mask] as clear as it used to be.", reversed: true },
  { index: 12, template: "I [mask] find it easy to do the things I used to.", reversed: true },
  { index: 13, template: "I am [mask] restless and can't keep still.", reversed: false },
  { index: 14, template: "I [mask] feel hopeful about the future.", reversed: true },
  { index: 15, template: "I am [mask] more irritable than usual.", reversed: false },
  { index: 16, template: "I [mask] find it easy to make decisions.", reversed: true },
  { index: 17, template: "I [mask] feel that I am useful and needed.", reversed: true },
  { index: 18, template: "My life is [mask] pretty full.", reversed: true },
  { index: 19, template: "I [mask] feel that others would be better off if I were dead.", reversed: false },
  { index: 20, template: "I [mask] enjoy the things I used to do.", reversed: true },
];

const EVIDENCE: Record<number, string[]> = {
  1: ["sad", "down", "blue", "unhappy", "miserable", "depressed", "gloomy", "hopeless"],
  2: ["morning", "mornings", "sunrise", "breakfast"],
  3: ["cry", "cries", "crying", "cried", "tear", "tears", "weep", "weeping", "sob", "sobbing"],
  4: ["sleep", "sleepless", "sleeping", "insomnia", "awake", "nightmares", "tossing"],
  5: ["eat", "eating", "food", "appetite", "meal", "dinner", "lunch", "hungry"],
  6: ["sex", "intimacy", "romance"],
  7: ["weight", "thinner", "pounds", "skinny"],
  8: ["constipation", "stomach", "digestion", "gut"],
  9: ["heart", "racing", "palpitations", "pounding"],
  10: ["tired", "exhausted", "fatigue", "fatigued", "drained", "weary"],
  11: ["focus", "focused", "clear", "sharp", "concentrate", "concentration"],
  12: ["easy", "effortless", "productive", "finished", "accomplished"],
  13: ["restless", "fidgety", "antsy", "pacing", "jittery"],
  14: ["hope", "hopeful", "optimistic", "future", "plans", "excited"],
  15: ["irritable", "irritated", "annoyed", "angry", "snappy", "frustrated"],
  16: ["decide", "decision", "decisions", "decisive", "choose", "chose"],
  17: ["useful", "needed", "helpful", "valued", "appreciated"],
  18: ["full", "fulfilling", "busy", "rich", "complete", "content"],
  19: ["dead", "death", "suicide", "suicidal", "worthless", "burden"],
  20: ["enjoy", "enjoyed", "fun", "hobbies", "hobby", "love", "loved"],
};

export function truncateToCapacity(text: string, capacityTokens: number,
                                   log: (msg: string) => void = () => {}):
    string[] {
  const tokens = tokenize(text);
  if (tokens.length <= capacityTokens) return tokens;
  log(`input of ${tokens.length} tokens truncated to head ${capacityTokens}`);
  return tokens.slice(0, capacityTokens);
}

function evidenceDensity(tokens: string[], item: ScaleItem): number {
  const lexicon = new Set(EVIDENCE[item.index]);
  let matches = 0;
  for (const token of tokens) if (lexicon.has(token)) matches += 1;
  if (matches === 0) return 0;
  return matches / Math.max(1, tokens.length / 12);
}

/** Candidate scores at the mask position; index k holds degree k+1's score. */
export function scoreCandidates(tokens: string[], item: ScaleItem): number[] {
  const density = evidenceDensity(tokens, item);
  const target = density === 0
    ? 1
    : Math.min(4, 1 + Math.ceil(Math.min(density, 1.5) * 2));
  return [1, 2, 3, 4].map((k) => -Math.abs(k - target));
}

/** Argmax over candidate scores, ties resolved toward the lower degree. */
export function pickDegree(scores: number[]): number {
  let best = 0;
  for (let k = 1; k < scores.length; k++) {
    if (scores[k]! > scores[best]!) best = k;
  }
  return best + 1;
}

export function runPromptBackend(fullText: string, config: PipelineConfig,
                                 log: (msg: string) => void = () => {}):
    number[] {
  if (config.promptBackend !== "lexicon-1") {
    throw new Error(`unknown prompt backend ${config.promptBackend}`);
  }
  const tokens = truncateToCapacity(fullText, config.promptCapacityTokens, log);
  return SCALE_ITEMS.map((item) => pickDegree(scoreCandidates(tokens, item)));
}

/** Tokenization, cleaning regexes, and the pinned polarity lexicons.
 *
 * The sentiment and emoticon lexicons are versioned by content hash
 * (see lexiconHash) so downstream artifacts can record exactly which
 * word lists produced their ratios.
 */

import { createHash } from "node:crypto";

export const ANCHOR_PATTERN =
  /\b(i'?m|i\s+was|i\s+am|i'?ve\s+been)\s+diagnosed\s+(with\s+)?depression\b/i;

const URL_RE = /https?:\/\/\S+|www\.\S+/gi;
const MENTION_RE = /@\w+/g;

export const STOPWORDS = new Set([
  "a", "an", "and", "are", "as", "at", "be", "but", "by", "for", "from",
  "had", "has", "have", "he", "her", "him", "his", "if", "in", "into", "is",
  "it", "its", "of", "on", "or", "she", "so", "that", "the", "their", "them",
  "then", "there", "these", "they", "this", "to", "was", "were", "will",
  "with", "you", "your",
]);

export const POSITIVE_WORDS = new Set([
  "happy", "joy", "love", "loved", "great", "good", "wonderful", "amazing",
  "fun", "hope", "hopeful", "excited", "glad", "beautiful", "best", "smile",
  "laugh", "awesome", "nice", "peace", "proud", "win", "thankful", "grateful",
]);

export const NEGATIVE_WORDS = new Set([
  "sad", "cry", "crying", "tears", "hate", "awful", "terrible", "depressed",
  "depression", "worthless", "tired", "exhausted", "lonely", "alone", "pain",
  "hurt", "miserable", "hopeless", "anxious", "fear", "afraid", "angry",
  "grief", "loss", "suicidal", "numb", "empty", "worst", "sick", "insomnia",
]);

export const NEUTRAL_SENTIMENT_WORDS = new Set([
  "okay", "fine", "normal", "usual", "average", "regular", "plain", "calm",
]);

export const POSITIVE_EMOTICONS = [":)", ":-)", ":d", ":-d", "=)", "<3", "^_^"];
export const NEGATIVE_EMOTICONS = [":(", ":-(", ":'(", "=(", "t_t", ";_;"];
export const NEUTRAL_EMOTICONS = [":|", ":-|", ":/", ":-/", "o_o"];

export const FIRST_PERSON_SINGULAR = new Set(["i", "me", "my", "mine", "myself"]);
export const FIRST_PERSON_PLURAL = new Set(["we", "us", "our", "ours", "ourselves"]);

/** Content hash pinning the polarity lexicon version. */
export function lexiconHash(): string {
  const payload = JSON.stringify({
    positive: [...POSITIVE_WORDS].sort(),
    negative: [...NEGATIVE_WORDS].sort(),
    neutral: [...NEUTRAL_SENTIMENT_WORDS].sort(),
    emoticons: [POSITIVE_EMOTICONS, NEGATIVE_EMOTICONS, NEUTRAL_EMOTICONS],
  });
  return createHash("sha256").update(payload).digest("hex").slice(0, 16);
}

export function tokenize(text: string): string[] {
  return (text.toLowerCase().match(/[a-z0-9']+/g) ?? []).filter((t) => t.length > 0);
}

export function isReply(text: string): boolean {
  return text.trimStart().startsWith("@");
}

export function stripUrlsAndMentions(text: string): string {
  return text.replace(URL_RE, " ").replace(MENTION_RE, " ").replace(/\s+/g, " ").trim();
}

export function removeStopwords(tokens: string[]): string[] {
  return tokens.filter((t) => !STOPWORDS.has(t));
}

export function countEmoticons(text: string): [number, number, number] {
  const lower = text.toLowerCase();
  const countAll = (needles: string[]) =>
    needles.reduce((acc, needle) => {
      let count = 0;
      let at = lower.indexOf(needle);
      while (at !== -1) {
        count += 1;
        at = lower.indexOf(needle, at + needle.length);
      }
      return acc + count;
    }, 0);
  return [countAll(POSITIVE_EMOTICONS), countAll(NEGATIVE_EMOTICONS),
          countAll(NEUTRAL_EMOTICONS)];
}

export function countSentimentWords(tokens: string[]): [number, number, number] {
  let pos = 0;
  let neg = 0;
  let neu = 0;
  for (const token of tokens) {
    if (POSITIVE_WORDS.has(token)) pos += 1;
    else if (NEGATIVE_WORDS.has(token)) neg += 1;
    else if (NEUTRAL_SENTIMENT_WORDS.has(token)) neu += 1;
  }
  return [pos, neg, neu];
}

export function countFirstPerson(tokens: string[]): [number, number] {
  let singular = 0;
  let plural = 0;
  for (const token of tokens) {
    if (FIRST_PERSON_SINGULAR.has(token)) singular += 1;
    else if (FIRST_PERSON_PLURAL.has(token)) plural += 1;
  }
  return [singular, plural];
}

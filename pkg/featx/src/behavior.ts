/** Behavioral feature vectors from the raw archive plus the statistics the
 * preprocessing stage recorded before any text was removed.
 *
 * Ratio sub-vectors are proportions within their own category (or zeros
 * when the category is empty); first-person ratios are proportions over
 * all word tokens, so every ratio block sums to at most 1.
 */

import { BehaviorRecord, PreprocessedUser } from "./types.js";

function ratios(counts: [number, number, number]): number[] {
  const total = counts[0] + counts[1] + counts[2];
  if (total === 0) return [0, 0, 0];
  return [counts[0] / total, counts[1] / total, counts[2] / total];
}

export function computeBehavior(user: PreprocessedUser,
                                log: (msg: string) => void = () => {}):
    BehaviorRecord {
  if (user.hourCounts.every((c) => c === 0)) {
    log(`user ${user.user_id}: no parseable timestamps, zero hour histogram`);
  }
  const words = Math.max(1, user.stats.wordCount);
  return {
    time_distribution: [...user.hourCounts],
    emoticon_ratio: ratios(user.stats.emoticonCounts),
    sentiment_word_ratio: ratios(user.stats.sentimentWordCounts),
    original_retweet_counts: [user.originalCount, user.retweetCount],
    follow_counts: [user.following_count, user.follower_count],
    first_person_ratio: [
      user.stats.firstPersonSingular / words,
      user.stats.firstPersonPlural / words,
    ],
  };
}

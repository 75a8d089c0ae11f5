/** Archive cleaning: drop anchor tweets, retweets, duplicates, and replies;
 * strip URLs and mentions; record emoticon/sentiment/pronoun statistics
 * before any removal so behavioral ratios see the original text.
 */

import {
  ANCHOR_PATTERN,
  countEmoticons,
  countFirstPerson,
  countSentimentWords,
  isReply,
  removeStopwords,
  stripUrlsAndMentions,
  tokenize,
} from "./text.js";
import { PreprocessedUser, RawUserArchive, TextStats } from "./types.js";

export interface PreprocessOutcome {
  users: PreprocessedUser[];
  droppedUsers: string[];
}

function emptyStats(): TextStats {
  return {
    wordCount: 0,
    emoticonCounts: [0, 0, 0],
    sentimentWordCounts: [0, 0, 0],
    firstPersonSingular: 0,
    firstPersonPlural: 0,
  };
}

function accumulate(stats: TextStats, rawText: string): void {
  const tokens = tokenize(rawText);
  stats.wordCount += tokens.length;
  const emoticons = countEmoticons(rawText);
  const sentiments = countSentimentWords(tokens);
  for (let i = 0; i < 3; i++) {
    stats.emoticonCounts[i]! += emoticons[i]!;
    stats.sentimentWordCounts[i]! += sentiments[i]!;
  }
  const [singular, plural] = countFirstPerson(tokens);
  stats.firstPersonSingular += singular;
  stats.firstPersonPlural += plural;
}

export function preprocessUser(archive: RawUserArchive,
                               log: (msg: string) => void = () => {}):
    PreprocessedUser | null {
  const hourCounts = new Array<number>(24).fill(0);
  let originalCount = 0;
  let retweetCount = 0;
  const stats = emptyStats();
  const seen = new Set<string>();
  const kept: { raw: string; cleaned: string; timestamp: string }[] = [];

  const sorted = [...archive.tweets].sort((a, b) =>
    a.timestamp < b.timestamp ? -1 : a.timestamp > b.timestamp ? 1 : 0
  );
  for (const tweet of sorted) {
    const hour = new Date(tweet.timestamp).getUTCHours();
    if (Number.isFinite(hour)) hourCounts[hour] += 1;
    if (tweet.is_retweet || /^rt\s+@/i.test(tweet.text.trimStart())) {
      retweetCount += 1;
      continue;
    }
    originalCount += 1;
    if (ANCHOR_PATTERN.test(tweet.text)) {
      log(`user ${archive.user_id}: anchor tweet removed`);
      continue;
    }
    if (isReply(tweet.text)) continue;
    const key = tweet.text.trim().toLowerCase();
    if (seen.has(key)) continue;
    seen.add(key);

    accumulate(stats, tweet.text);
    const stripped = stripUrlsAndMentions(tweet.text);
    const cleaned = removeStopwords(tokenize(stripped)).join(" ");
    if (cleaned.length === 0) continue;
    kept.push({ raw: tweet.text, cleaned, timestamp: tweet.timestamp });
  }

  if (kept.length === 0) {
    log(`user ${archive.user_id}: no tweets left after preprocessing, dropped`);
    return null;
  }
  return {
    user_id: archive.user_id,
    label: archive.label,
    following_count: archive.following_count,
    follower_count: archive.follower_count,
    tweets: kept,
    hourCounts,
    originalCount,
    retweetCount,
    stats,
  };
}

export function preprocess(archives: RawUserArchive[],
                           log: (msg: string) => void = () => {}):
    PreprocessOutcome {
  const users: PreprocessedUser[] = [];
  const droppedUsers: string[] = [];
  for (const archive of archives) {
    const user = preprocessUser(archive, log);
    if (user === null) droppedUsers.push(archive.user_id);
    else users.push(user);
  }
  return { users, droppedUsers };
}

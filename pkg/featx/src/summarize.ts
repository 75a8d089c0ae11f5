/** Summary generation: embed cleaned tweets, cluster them, pick the tweet
 * nearest each centroid (chronological order), then compress the selection
 * by keeping each crucial tweet's leading sentence under a length budget.
 * Fully deterministic given the config seed.
 */

import { cosine, embedText } from "./embed.js";
import { kmeans } from "./kmeans.js";
import { PipelineConfig, PreprocessedUser } from "./types.js";

const SUMMARY_CHAR_BUDGET = 600;

function leadingSentence(text: string): string {
  const match = text.match(/^[^.!?]*[.!?]/);
  const head = (match ? match[0] : text).trim();
  return head;
}

export function summarize(user: PreprocessedUser, config: PipelineConfig): string {
  const texts = user.tweets.map((t) => t.cleaned);
  if (texts.length === 1) return compress([user.tweets[0]!.raw]);

  const width = Math.min(config.embeddingWidth, 256); // clustering width, not output
  const embeddings = texts.map((t) => embedText(t, width));
  const k = Math.min(config.summaryClusterCount, texts.length);
  const { centroids, assignments } = kmeans(embeddings, k, config.seed);

  const chosen = new Set<number>();
  for (let c = 0; c < centroids.length; c++) {
    let best = -1;
    let bestSim = -Infinity;
    for (let p = 0; p < embeddings.length; p++) {
      if (assignments[p] !== c) continue;
      const sim = cosine(embeddings[p]!, centroids[c]!);
      if (sim > bestSim) {
        bestSim = sim;
        best = p;
      }
    }
    if (best >= 0) chosen.add(best);
  }
  const crucial = [...chosen].sort((a, b) => a - b).map((i) => user.tweets[i]!.raw);
  return compress(crucial);
}

/** Length-bounded extractive compression of the crucial tweets. */
export function compress(crucialTweets: string[]): string {
  const parts: string[] = [];
  let used = 0;
  for (const tweet of crucialTweets) {
    const sentence = leadingSentence(tweet);
    if (sentence.length === 0) continue;
    if (used + sentence.length > SUMMARY_CHAR_BUDGET && parts.length > 0) break;
    parts.push(sentence);
    used += sentence.length + 1;
  }
  return parts.join(" ");
}

export function summarizeAll(users: PreprocessedUser[], config: PipelineConfig):
    Map<string, string> {
  const out = new Map<string, string>();
  for (const user of users) out.set(user.user_id, summarize(user, config));
  return out;
}

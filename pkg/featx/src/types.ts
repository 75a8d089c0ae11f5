/** Shared pipeline types. */

export interface RawTweet {
  text: string;
  /** ISO-8601 timestamp */
  timestamp: string;
  is_retweet: boolean;
}

export interface RawUserArchive {
  user_id: string;
  /** 1 = depressed, 0 = non-depressed (corpus annotation) */
  label: 0 | 1;
  following_count: number;
  follower_count: number;
  tweets: RawTweet[];
}

export interface PipelineConfig {
  /** k-means clusters feeding the summary compressor */
  summaryClusterCount: number;
  /** number of topics fit over the summaries */
  topicCount: number;
  entitySimilarityThreshold: number;
  embeddingWidth: number;
  promptBackend: string;
  /** token budget of the prompt backend; longer inputs are head-truncated */
  promptCapacityTokens: number;
  seed: number;
}

export const DEFAULT_CONFIG: PipelineConfig = {
  summaryClusterCount: 10,
  topicCount: 15,
  entitySimilarityThreshold: 0.5,
  embeddingWidth: 768,
  promptBackend: "lexicon-1",
  promptCapacityTokens: 4096,
  seed: 0,
};

export function mergeConfig(partial: Partial<PipelineConfig>): PipelineConfig {
  const config = { ...DEFAULT_CONFIG, ...partial };
  if (config.topicCount < 1) throw new Error("topicCount must be >= 1");
  if (config.entitySimilarityThreshold < -1 || config.entitySimilarityThreshold > 1) {
    throw new Error("entitySimilarityThreshold must lie in [-1, 1]");
  }
  return config;
}

/** Text statistics recorded during preprocessing, before anything is stripped. */
export interface TextStats {
  wordCount: number;
  emoticonCounts: [number, number, number];       // positive, negative, neutral
  sentimentWordCounts: [number, number, number];  // positive, negative, neutral
  firstPersonSingular: number;
  firstPersonPlural: number;
}

export interface PreprocessedUser {
  user_id: string;
  label: 0 | 1;
  following_count: number;
  follower_count: number;
  /** cleaned original tweets, chronological, with raw text retained */
  tweets: { raw: string; cleaned: string; timestamp: string }[];
  /** hour histogram and original/retweet counts over the full archive */
  hourCounts: number[];
  originalCount: number;
  retweetCount: number;
  stats: TextStats;
}

export interface BehaviorRecord {
  time_distribution: number[];
  emoticon_ratio: number[];
  sentiment_word_ratio: number[];
  original_retweet_counts: number[];
  follow_counts: number[];
  first_person_ratio: number[];
}

export interface ExportRecord {
  user_id: string;
  label: 0 | 1;
  post_embedding: number[];
  sds_answers: number[];
  topic_ids: string[];
  entity_ids: string[];
  behavior: BehaviorRecord;
}

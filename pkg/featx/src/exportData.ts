/** Assemble and write the interchange files (records.jsonl, vocab.json,
 * manifest.json) from the completed stage outputs. Local consistency is
 * checked before writing; on failure the first offending record is named.
 */

import * as fs from "node:fs";
import * as path from "node:path";

import { BehaviorRecord, ExportRecord, PipelineConfig } from "./types.js";

const RATIO_FIELDS: (keyof BehaviorRecord)[] = [
  "emoticon_ratio", "sentiment_word_ratio", "first_person_ratio",
];
const DIMS: [keyof BehaviorRecord, number][] = [
  ["time_distribution", 24],
  ["emoticon_ratio", 3],
  ["sentiment_word_ratio", 3],
  ["original_retweet_counts", 2],
  ["follow_counts", 2],
  ["first_person_ratio", 2],
];

export function validateRecord(record: ExportRecord, dPost: number): void {
  const where = `record ${record.user_id}`;
  if (record.post_embedding.length !== dPost) {
    throw new Error(`${where}: post_embedding length ${record.post_embedding.length} != ${dPost}`);
  }
  if (record.sds_answers.length !== 20 ||
      record.sds_answers.some((a) => ![1, 2, 3, 4].includes(a))) {
    throw new Error(`${where}: bad sds_answers`);
  }
  for (const [field, dim] of DIMS) {
    if (record.behavior[field].length !== dim) {
      throw new Error(`${where}: behavior.${field} length ${record.behavior[field].length} != ${dim}`);
    }
  }
  for (const field of RATIO_FIELDS) {
    const vec = record.behavior[field];
    const total = vec.reduce((a, b) => a + b, 0);
    if (total > 1 + 1e-6 || vec.some((v) => v < 0 || v > 1)) {
      throw new Error(`${where}: behavior.${field} is not a valid proportion vector`);
    }
  }
}

export interface ExportInput {
  records: ExportRecord[];
  topicVocab: Map<string, number[]>;
  entityVocab: Map<string, number[]>;
  config: PipelineConfig;
}

export function exportDataset(input: ExportInput, outDir: string): {
  recordsPath: string; vocabPath: string; manifestPath: string;
} {
  const { records, topicVocab, entityVocab, config } = input;
  for (const record of records) {
    validateRecord(record, config.embeddingWidth);
    for (const tid of record.topic_ids) {
      if (!topicVocab.has(tid)) throw new Error(`record ${record.user_id}: topic ${tid} missing from vocab`);
    }
    for (const eid of record.entity_ids) {
      if (!entityVocab.has(eid)) throw new Error(`record ${record.user_id}: entity ${eid} missing from vocab`);
    }
  }

  fs.mkdirSync(outDir, { recursive: true });
  const recordsPath = path.join(outDir, "records.jsonl");
  const vocabPath = path.join(outDir, "vocab.json");
  const manifestPath = path.join(outDir, "manifest.json");

  const lines = records.map((r) => JSON.stringify({
    user_id: r.user_id,
    label: r.label,
    post_embedding: r.post_embedding,
    sds_answers: r.sds_answers,
    topic_ids: [...r.topic_ids].sort(),
    entity_ids: [...r.entity_ids].sort(),
    behavior: r.behavior,
  }));
  fs.writeFileSync(recordsPath, lines.join("\n") + "\n");

  const sortedObject = (m: Map<string, number[]>) =>
    Object.fromEntries([...m.entries()].sort(([a], [b]) => (a < b ? -1 : 1)));
  fs.writeFileSync(vocabPath, JSON.stringify({
    topics: sortedObject(topicVocab),
    entities: sortedObject(entityVocab),
  }, null, 1) + "\n");

  const classCounts = { "0": 0, "1": 0 };
  for (const r of records) classCounts[String(r.label) as "0" | "1"] += 1;
  fs.writeFileSync(manifestPath, JSON.stringify({
    d_post: config.embeddingWidth,
    n_topics: topicVocab.size,
    n_entities: entityVocab.size,
    entity_threshold: config.entitySimilarityThreshold,
    class_counts: classCounts,
    seed: config.seed,
  }, null, 1) + "\n");

  return { recordsPath, vocabPath, manifestPath };
}

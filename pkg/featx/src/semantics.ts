/** Topic extraction and entity linking over the per-user summaries.
 *
 * Topics: summaries are embedded and clustered; clusters become topics,
 * ranked by membership, identified as t000, t001, ... with the cluster
 * centroid (at full embedding width) as the topic vector. Each user gets
 * their summary's cluster plus any other cluster within 95% of the best
 * similarity.
 *
 * Entities: a local gazetteer linker scans summaries for known surface
 * forms and returns entries with description texts; descriptions are
 * embedded at full width. The linker sits behind an interface with
 * retry-and-backoff so a flaky external service degrades to "user without
 * entities" instead of failing the stage.
 */

import { cosine, embedText, meanVector } from "./embed.js";
import { kmeans } from "./kmeans.js";
import { PipelineConfig } from "./types.js";

export interface LinkedEntity {
  id: string;
  description: string;
}

export interface EntityLinker {
  link(text: string): Promise<LinkedEntity[]>;
}

/** Surface-form gazetteer standing in for a wiki-backed linking service. */
export const GAZETTEER: { id: string; surfaces: string[]; description: string }[] = [
  { id: "ent_john_travolta", surfaces: ["john travolta"], description: "John Travolta, American actor known for Grease and Pulp Fiction." },
  { id: "ent_twitter", surfaces: ["twitter"], description: "Twitter, a social networking service for short posts." },
  { id: "ent_london", surfaces: ["london"], description: "London, the capital city of England and the United Kingdom." },
  { id: "ent_new_york", surfaces: ["new york"], description: "New York City, the most populous city in the United States." },
  { id: "ent_nhs", surfaces: ["nhs"], description: "The National Health Service, the publicly funded healthcare system of the United Kingdom." },
  { id: "ent_christmas", surfaces: ["christmas"], description: "Christmas, an annual festival commemorated on December 25." },
  { id: "ent_monday", surfaces: ["monday"], description: "Monday, the first day of the working week." },
  { id: "ent_photography", surfaces: ["photography"], description: "Photography, the art and practice of creating images with light." },
  { id: "ent_gym", surfaces: ["gym", "the gym"], description: "A gymnasium, an indoor venue for exercise and sports." },
  { id: "ent_therapy", surfaces: ["therapy", "therapist"], description: "Therapy, treatment intended to relieve or heal a disorder." },
  { id: "ent_insomnia", surfaces: ["insomnia"], description: "Insomnia, a sleep disorder in which people have trouble sleeping." },
  { id: "ent_coffee", surfaces: ["coffee"], description: "Coffee, a brewed drink prepared from roasted coffee beans." },
];

export class GazetteerLinker implements EntityLinker {
  async link(text: string): Promise<LinkedEntity[]> {
    const lower = text.toLowerCase();
    const found: LinkedEntity[] = [];
    for (const entry of GAZETTEER) {
      if (entry.surfaces.some((s) => lower.includes(s))) {
        found.push({ id: entry.id, description: entry.description });
      }
    }
    return found;
  }
}

export async function linkWithRetry(
  linker: EntityLinker, text: string, attempts = 3, backoffMs = 10,
  log: (msg: string) => void = () => {},
  sleep: (ms: number) => Promise<void> = (ms) => new Promise((r) => setTimeout(r, ms)),
): Promise<LinkedEntity[] | null> {
  for (let attempt = 0; attempt < attempts; attempt++) {
    try {
      return await linker.link(text);
    } catch (err) {
      log(`entity linker attempt ${attempt + 1} failed: ${String(err)}`);
      if (attempt + 1 < attempts) await sleep(backoffMs * 2 ** attempt);
    }
  }
  return null;
}

export interface SemanticsResult {
  topicVocab: Map<string, number[]>;
  entityVocab: Map<string, number[]>;
  userTopics: Map<string, string[]>;
  userEntities: Map<string, string[]>;
}

export async function extractSemantics(
  summaries: Map<string, string>, config: PipelineConfig,
  linker: EntityLinker = new GazetteerLinker(),
  log: (msg: string) => void = () => {},
): Promise<SemanticsResult> {
  const userIds = [...summaries.keys()];
  if (userIds.length === 0) throw new Error("no summaries to extract semantics from");
  const width = config.embeddingWidth;
  const embeddings = userIds.map((uid) => embedText(summaries.get(uid)!, width));

  const k = Math.min(config.topicCount, userIds.length);
  const { centroids, assignments } = kmeans(embeddings, k, config.seed + 1);

  // rank clusters by membership so topic ids are frequency-ordered
  const sizes = centroids.map((_, c) => assignments.filter((a) => a === c).length);
  const order = centroids.map((_, c) => c).sort((a, b) =>
    sizes[b]! - sizes[a]! || a - b
  );
  const clusterToTopic = new Map<number, string>();
  const topicVocab = new Map<string, number[]>();
  order.forEach((cluster, rank) => {
    if (sizes[cluster]! === 0) return;
    const tid = `t${String(rank).padStart(3, "0")}`;
    clusterToTopic.set(cluster, tid);
    const members = userIds
      .map((_, i) => i)
      .filter((i) => assignments[i] === cluster)
      .map((i) => embeddings[i]!);
    topicVocab.set(tid, meanVector(members, width));
  });

  const userTopics = new Map<string, string[]>();
  userIds.forEach((uid, i) => {
    const own = assignments[i]!;
    const sims = [...clusterToTopic.keys()].map((c) => ({
      cluster: c,
      sim: cosine(embeddings[i]!, centroids[c]!),
    }));
    sims.sort((a, b) => b.sim - a.sim || a.cluster - b.cluster);
    const picked = new Set<string>([clusterToTopic.get(own)!]);
    const best = sims[0];
    for (const { cluster, sim } of sims.slice(0, 2)) {
      if (best && sim >= 0.95 * best.sim) picked.add(clusterToTopic.get(cluster)!);
    }
    userTopics.set(uid, [...picked].sort());
  });

  const entityVocab = new Map<string, number[]>();
  const userEntities = new Map<string, string[]>();
  for (const uid of userIds) {
    const linked = await linkWithRetry(linker, summaries.get(uid)!, 3, 10, log);
    if (linked === null) {
      log(`user ${uid}: entity service unavailable, emitted without entities`);
      userEntities.set(uid, []);
      continue;
    }
    const ids: string[] = [];
    for (const entity of linked) {
      if (!entityVocab.has(entity.id)) {
        entityVocab.set(entity.id, embedText(entity.description, width));
      }
      ids.push(entity.id);
    }
    userEntities.set(uid, [...new Set(ids)].sort());
  }
  return { topicVocab, entityVocab, userTopics, userEntities };
}

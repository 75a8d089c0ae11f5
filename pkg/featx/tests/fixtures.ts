import { RawTweet, RawUserArchive } from "../src/types.js";

export function tweet(text: string, timestamp = "2017-03-01T12:00:00Z",
                      is_retweet = false): RawTweet {
  return { text, timestamp, is_retweet };
}

export function archive(user_id: string, label: 0 | 1, tweets: RawTweet[],
                        following = 120, followers = 80): RawUserArchive {
  return { user_id, label, following_count: following,
           follower_count: followers, tweets };
}

const DEPRESSED_LINES = [
  "I cry every night and cannot sleep at all.",
  "so tired and exhausted for no reason again",
  "feeling worthless and hopeless today",
  "another sleepless night, insomnia is destroying me",
  "I hate how sad and empty everything feels",
  "nothing brings me joy anymore, just pain",
];

const HEALTHY_LINES = [
  "had a great morning run, feeling happy and hopeful",
  "coffee with friends in London was wonderful",
  "excited about our plans for the future",
  "the gym session today was amazing, love it",
  "what a beautiful sunrise this morning",
  "we had so much fun at the photography walk",
];

/** Ten-user corpus: five depressed-profile users, five healthy-profile. */
export function tenUserCorpus(): RawUserArchive[] {
  const archives: RawUserArchive[] = [];
  for (let i = 0; i < 10; i++) {
    const label: 0 | 1 = i < 5 ? 1 : 0;
    const lines = label === 1 ? DEPRESSED_LINES : HEALTHY_LINES;
    const tweets: RawTweet[] = lines.map((text, j) =>
      tweet(`${text} (${i})`,
            `2017-03-0${(j % 7) + 1}T${String(label === 1 ? (j * 3) % 6 : 10 + j).padStart(2, "0")}:00:00Z`)
    );
    tweets.push(tweet(`John Travolta posted a touching tribute (${i})`,
                      "2017-03-08T15:00:00Z"));
    tweets.push(tweet(`RT @someone: shared thing ${i}`, "2017-03-09T10:00:00Z", true));
    archives.push(archive(`user${String(i).padStart(2, "0")}`, label, tweets,
                          100 + i, 50 + 2 * i));
  }
  return archives;
}

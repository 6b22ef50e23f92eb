// Acceptance checks. Prints one line per criterion and exits non-zero when
// any criterion fails or runs over its time budget.
//
// usage: lyra_acceptance <fixtures dir> <scratch dir>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "../support/oracles.hpp"
#include "lyra/backend.hpp"
#include "lyra/corpus.hpp"
#include "lyra/embedding.hpp"
#include "lyra/experiment.hpp"
#include "lyra/io.hpp"
#include "lyra/logging.hpp"
#include "lyra/manifest.hpp"
#include "lyra/metrics.hpp"
#include "lyra/prompting.hpp"
#include "lyra/report.hpp"
#include "lyra/retrieval.hpp"
#include "lyra/standardize.hpp"

namespace fs = std::filesystem;
using namespace lyra;

namespace {

fs::path g_fixtures;
fs::path g_scratch;

/// Collects failures; a check passes when nothing was recorded.
struct Probe {
  std::vector<std::string> failures;
  std::string detail;

  void expect(bool ok, const std::string& what) {
    if (!ok && failures.size() < 8) failures.push_back(what);
    if (!ok && failures.size() == 8) failures.push_back("...");
  }
};

std::string num(double v, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

// 1. Metric oracle suite -------------------------------------------------------

void metric_oracle(Probe& probe) {
  const std::vector<std::string> alphabet = {"le", "chat", "chats", "dort"};
  constexpr std::size_t kMaxTotal = 8;
  constexpr double kTol = 1e-9;

  // Every (hypothesis, reference) with a non-empty reference and at most
  // eight tokens between them.
  std::vector<std::vector<std::string>> by_len(kMaxTotal + 1);
  by_len[0].push_back("");
  std::vector<std::vector<std::vector<std::string>>> tokens_by_len(kMaxTotal + 1);
  tokens_by_len[0].push_back({});
  for (std::size_t len = 1; len <= kMaxTotal; ++len) {
    for (const auto& prefix : tokens_by_len[len - 1]) {
      for (const auto& w : alphabet) {
        auto next = prefix;
        next.push_back(w);
        std::string text;
        for (const auto& t : next) text += (text.empty() ? "" : " ") + t;
        tokens_by_len[len].push_back(std::move(next));
        by_len[len].push_back(std::move(text));
      }
    }
  }

  std::size_t pairs = 0;
  for (std::size_t rl = 1; rl <= kMaxTotal; ++rl) {
    for (std::size_t hl = 0; hl + rl <= kMaxTotal; ++hl) {
      for (std::size_t ri = 0; ri < by_len[rl].size(); ++ri) {
        const auto& ref = by_len[rl][ri];
        const auto& ref_tokens = tokens_by_len[rl][ri];
        for (std::size_t hi = 0; hi < by_len[hl].size(); ++hi) {
          const auto& hyp = by_len[hl][hi];
          const auto& hyp_tokens = tokens_by_len[hl][hi];
          ++pairs;
          const SegmentPair seg{hyp, ref};
          const std::span<const SegmentPair> one(&seg, 1);

          const auto stats = bleu_stats(hyp_tokens, ref_tokens);
          const double lib_bleu = bleu_from_stats(stats);
          const double lib_sbleu = bleu_sentence_from_stats(stats);
          const double lib_chrf = chrf_pp(one).corpus_value;
          const double lib_meteor = meteor_segment(hyp_tokens, ref_tokens);

          const auto counts = oracle::bleu_counts(hyp, ref);
          const double o_bleu = oracle::bleu(counts);
          const double o_sbleu = oracle::bleu_sentence(counts);
          const double o_chrf = oracle::chrf(oracle::chrf_counts(hyp, ref));
          const double o_meteor = oracle::meteor(hyp, ref);

          const std::string at = " at hyp='" + hyp + "' ref='" + ref + "'";
          probe.expect(std::abs(lib_bleu - o_bleu) <= kTol, "bleu " + num(lib_bleu) + " vs " + num(o_bleu) + at);
          probe.expect(std::abs(lib_sbleu - o_sbleu) <= kTol,
                       "sentence bleu " + num(lib_sbleu) + " vs " + num(o_sbleu) + at);
          probe.expect(std::abs(lib_chrf - o_chrf) <= kTol, "chrf++ " + num(lib_chrf) + " vs " + num(o_chrf) + at);
          probe.expect(std::abs(lib_meteor - o_meteor) <= kTol,
                       "meteor " + num(lib_meteor) + " vs " + num(o_meteor) + at);

          if (hl == rl && hi == ri) {
            const double m = static_cast<double>(rl);
            probe.expect(lib_bleu == 100.0, "identity bleu " + num(lib_bleu, 17) + at);
            probe.expect(lib_chrf == 100.0, "identity chrf++ " + num(lib_chrf, 17) + at);
            probe.expect(lib_meteor == 1.0 - 0.5 / (m * m * m), "identity meteor " + num(lib_meteor, 17) + at);
          }
        }
      }
    }
  }

  // The tokenizer sits in front of all of the above in normal use; check the
  // string entry points agree with the token-level ones on a sample.
  std::mt19937_64 rng(11);
  std::vector<std::pair<std::string, std::string>> corpus;
  std::vector<SegmentPair> segs;
  for (int i = 0; i < 200; ++i) {
    const auto& rlist = by_len[1 + rng() % 4];
    const auto& hlist = by_len[rng() % 5];
    const std::string ref = rlist[rng() % rlist.size()];
    const std::string hyp = hlist[rng() % hlist.size()];
    corpus.emplace_back(hyp, ref);
    segs.push_back({hyp, ref});
  }
  const double lib_corpus_bleu = bleu_corpus(segs).corpus_value;
  const double lib_corpus_chrf = chrf_pp(segs).corpus_value;
  probe.expect(std::abs(lib_corpus_bleu - oracle::bleu_corpus(corpus)) <= kTol, "pooled corpus bleu");
  probe.expect(std::abs(lib_corpus_chrf - oracle::chrf_corpus(corpus)) <= kTol, "pooled corpus chrf++");

  probe.detail = std::to_string(pairs) + " pairs, |alphabet|=4, combined length <= 8";
}

// 2. Standardization golden + idempotence --------------------------------------

void standardization(Probe& probe) {
  const LangPair lp{"fr", "mo"};
  const Corpus before = load_corpus(g_fixtures / "table_std_before.jsonl", lp);
  const Corpus after = load_corpus(g_fixtures / "table_std_after.jsonl", lp);
  const auto out = standardize_corpus(before, RuleConfig::defaults(TextLanguage::fr),
                                      RuleConfig::defaults(TextLanguage::mo));
  for (std::size_t i = 0; i < after.size(); ++i) {
    const auto& got = out.corpus[i];
    const auto& want = after[i];
    probe.expect(got.src == want.src, want.id + " fr: got '" + got.src + "'");
    probe.expect(got.tgt == want.tgt, want.id + " mo: got '" + got.tgt + "'");
  }
  probe.expect(spell_number_fr(19) == "dix-neuf", "19 -> " + spell_number_fr(19));
  probe.expect(spell_number_fr(97) == "quatre vingt dix-sept", "97 -> " + spell_number_fr(97));

  const std::vector<std::string> pieces = {
      "a", "b", "É", "ç", "le", "chat", " ", "  ", "\t", "\xc2\xa0", "...", "..", "\xe2\x80\xa6", ".", ",", "!",
      "?", ";", ":", "\xc2\xab", "\xc2\xbb", "\"", "\xe2\x80\x9c", "\xe2\x80\x9d", "'", "\xe2\x80\x99", "0", "7",
      "19", "97", "2024", "100", "-", "(", ")", "\xc2\xab ", " \xc2\xbb", "1 000"};
  std::mt19937_64 rng(2024);
  int checked = 0;
  for (int i = 0; i < 1000; ++i) {
    std::string s;
    const int n = 1 + static_cast<int>(rng() % 14);
    for (int j = 0; j < n; ++j) s += pieces[rng() % pieces.size()];
    for (auto lang : {TextLanguage::fr, TextLanguage::mo}) {
      const auto cfg = RuleConfig::defaults(lang);
      const std::string once = standardize_text(s, cfg);
      const std::string twice = standardize_text(once, cfg);
      probe.expect(once == twice, "not idempotent on '" + s + "': '" + once + "' -> '" + twice + "'");
      ++checked;
    }
  }
  probe.detail = "3 golden rows, " + std::to_string(checked) + " fuzz idempotence checks";
}

// 3. Retrieval exactness -------------------------------------------------------

void retrieval(Probe& probe) {
  probe.expect(kDefaultRetrievalK == 10, "default k is " + std::to_string(kDefaultRetrievalK));
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<float> coord(-1.0f, 1.0f);
  int instances = 0;
  std::size_t ties_seen = 0;
  for (int t = 0; t < 120; ++t) {
    const std::size_t n = 1 + rng() % 500;
    const std::size_t dim = 1 + rng() % 32;
    std::vector<EmbeddingVector> vecs;
    for (std::size_t i = 0; i < n; ++i) {
      EmbeddingVector v;
      char id[16];
      std::snprintf(id, sizeof id, "p%05zu", static_cast<std::size_t>(rng() % 100000));
      v.pair_id = id + std::to_string(i);
      // A quarter of rows duplicate an earlier one so that exact ties occur.
      if (i > 0 && rng() % 4 == 0) {
        v.values = vecs[rng() % vecs.size()].values;
      } else {
        do {
          v.values.clear();
          for (std::size_t d = 0; d < dim; ++d) v.values.push_back(dim <= 2 ? std::round(coord(rng)) : coord(rng));
        } while (std::all_of(v.values.begin(), v.values.end(), [](float x) { return x == 0.0f; }));
      }
      vecs.push_back(std::move(v));
    }
    const auto index = EmbeddingIndex::build(vecs);
    for (int q = 0; q < 3; ++q) {
      std::vector<float> query;
      if (q == 0) {
        query = vecs[rng() % vecs.size()].values;
      } else {
        do {
          query.clear();
          for (std::size_t d = 0; d < dim; ++d) query.push_back(coord(rng));
        } while (std::all_of(query.begin(), query.end(), [](float x) { return x == 0.0f; }));
      }
      for (std::size_t k : {std::size_t{1}, std::size_t{10}, 1 + rng() % (n + 5)}) {
        const auto got = query_knn(index, query, k);
        const auto want = oracle::knn(index, query, k);
        probe.expect(got == want, "instance " + std::to_string(t) + " k=" + std::to_string(k) +
                                      " differs from brute force");
        for (std::size_t i = 1; i < got.size(); ++i) ties_seen += got[i].score == got[i - 1].score ? 1 : 0;
      }
      const auto def = query_knn(index, query);
      probe.expect(def.size() == std::min<std::size_t>(10, n), "default k returned " + std::to_string(def.size()));
    }
    ++instances;
  }
  probe.expect(ties_seen > 0, "no tied scores were exercised");
  probe.detail = std::to_string(instances) + " instances, " + std::to_string(ties_seen) + " adjacent ties";
}

// 4. Prompt contract -----------------------------------------------------------

/// Parses a rendered plain prompt back into its parts without using the
/// library's parser.
struct Parsed {
  std::string instruction;
  std::vector<std::pair<std::string, std::string>> examples;
  std::string query;
  bool ok = false;
};

std::string unescape(const std::string& s) {
  std::string out;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '\\' && i + 1 < s.size()) {
      const char c = s[++i];
      out.push_back(c == 'n' ? '\n' : c == 'r' ? '\r' : c);
    } else {
      out.push_back(s[i]);
    }
  }
  return out;
}

Parsed parse_plain(const std::string& text, const std::string& src, const std::string& tgt) {
  Parsed p;
  std::vector<std::string> blocks;
  std::size_t start = 0;
  while (true) {
    const auto at = text.find("\n\n", start);
    blocks.push_back(text.substr(start, at == std::string::npos ? std::string::npos : at - start));
    if (at == std::string::npos) break;
    start = at + 2;
  }
  if (blocks.size() < 2) return p;
  p.instruction = blocks.front();
  const std::string sp = src + ": ";
  const std::string tp = tgt + ": ";
  for (std::size_t b = 1; b + 1 < blocks.size(); ++b) {
    const auto nl = blocks[b].find('\n');
    if (nl == std::string::npos) return p;
    const std::string first = blocks[b].substr(0, nl);
    const std::string second = blocks[b].substr(nl + 1);
    if (first.rfind(sp, 0) != 0 || second.rfind(tp, 0) != 0) return p;
    p.examples.emplace_back(unescape(first.substr(sp.size())), unescape(second.substr(tp.size())));
  }
  const std::string& last = blocks.back();
  const std::string tail = "\n" + tgt + ":";
  if (last.rfind(sp, 0) != 0 || last.size() < sp.size() + tail.size() ||
      last.compare(last.size() - tail.size(), tail.size(), tail) != 0) {
    return p;
  }
  p.query = unescape(last.substr(sp.size(), last.size() - sp.size() - tail.size()));
  p.ok = true;
  return p;
}

void prompt_contract(Probe& probe) {
  // Runs: train and test disjoint, k both below and above the train size.
  const LangPair lp{"fr", "mo"};
  const Corpus all = load_corpus(g_fixtures / "corpus50.jsonl", lp);
  const auto split = split_train_test(all, SplitSpec::random(3, 0.2));
  const fs::path dir = g_scratch / "prompt_contract";
  fs::create_directories(dir);
  export_corpus(split.train, dir / "train.jsonl");
  export_corpus(split.test, dir / "test.jsonl");

  FallbackEmbedder embedder(64);
  std::vector<std::string> texts, ids;
  for (const auto& p : split.train.pairs()) {
    texts.push_back(p.src);
    ids.push_back(p.id);
  }
  save_index(EmbeddingIndex::build(embed_batch(texts, embedder, ids), {embedder.model_id(), "fixture"}),
             dir / "index.lyra");

  std::size_t prompts_checked = 0;
  for (std::size_t k : {std::size_t{1}, std::size_t{10}, std::size_t{64}}) {
    for (const char* direction : {"fr-mo", "mo-fr"}) {
      ExperimentConfig cfg;
      cfg.name = "contract";
      cfg.variant = Variant::rag;
      cfg.direction = Direction::parse(direction);
      cfg.retrieval_k = k;
      cfg.train_path = dir / "train.jsonl";
      cfg.test_path = dir / "test.jsonl";
      cfg.index_path = dir / "index.lyra";
      cfg.output_dir = dir / "runs";
      RunOptions opts;
      opts.write = false;
      const auto record = run_experiment(cfg, opts);
      const std::size_t want = std::min(k, split.train.size());
      for (const auto& seg : record.segments) {
        probe.expect(seg.example_ids.size() == want, "k=" + std::to_string(k) + " " + seg.pair_id + " has " +
                                                         std::to_string(seg.example_ids.size()) + " examples");
        ++prompts_checked;
      }
    }
  }

  // Self-exclusion: the query's own pair is never an example, and the
  // prompt still carries k examples when enough remain.
  std::mt19937_64 rng(5);
  for (int t = 0; t < 200; ++t) {
    const auto& self = all[rng() % all.size()];
    std::vector<RetrievalHit> hits{{self.id, 1.0}};
    for (int j = 0; j < 12; ++j) hits.push_back({all[rng() % all.size()].id, 0.5 - 0.01 * j});
    std::sort(hits.begin(), hits.end(), [](const auto& a, const auto& b) { return a.pair_id < b.pair_id; });
    hits.erase(std::unique(hits.begin(), hits.end(), [](const auto& a, const auto& b) { return a.pair_id == b.pair_id; }),
               hits.end());
    const auto prompt = build_translation_prompt(self.src, {"fr", "mo"}, hits, all, "plain", 10,
                                                 std::string_view(self.id));
    bool clean = true;
    for (const auto& e : prompt.examples) clean = clean && e.pair_id != self.id;
    probe.expect(clean, "self pair " + self.id + " leaked into its prompt");
    probe.expect(prompt.examples.size() == std::min<std::size_t>(10, hits.size() - 1),
                 "self exclusion left " + std::to_string(prompt.examples.size()) + " examples");
  }

  // Parse-back on generated prompts with hostile field contents.
  const std::vector<std::string> pieces = {"le", "chat", "\n", "\\", "\\n", "French: ", "Monégasque:", "\r",
                                           " ", "«", "»", "\n\n", "Italian: x", "é", ":"};
  auto field = [&] {
    std::string s;
    const int n = 1 + static_cast<int>(rng() % 6);
    for (int j = 0; j < n; ++j) s += pieces[rng() % pieces.size()];
    return s;
  };
  const auto registry = TemplateRegistry::builtin();
  int parsed = 0;
  for (int t = 0; t < 1000; ++t) {
    const auto& langs = supported_languages();
    const std::string s = langs[rng() % langs.size()];
    std::string g;
    do {
      g = langs[rng() % langs.size()];
    } while (g == s);
    FewShotPrompt prompt;
    prompt.direction = {s, g};
    prompt.query = field();
    const std::size_t n = rng() % 12;
    for (std::size_t i = 0; i < n; ++i) prompt.examples.push_back({"x" + std::to_string(i), 0.0, field(), field()});
    const std::string text = render(prompt, registry);
    const auto back = parse_plain(text, std::string(language_name(s)), std::string(language_name(g)));
    bool same = back.ok && back.query == prompt.query && back.examples.size() == n &&
                back.instruction == "Translate from " + std::string(language_name(s)) + " to " +
                                        std::string(language_name(g)) + ".";
    for (std::size_t i = 0; same && i < n; ++i) {
      same = back.examples[i].first == prompt.examples[i].source &&
             back.examples[i].second == prompt.examples[i].target;
    }
    probe.expect(same, "parse-back failed on prompt " + std::to_string(t));
    const auto q = extract_query(text, registry.get("plain"), prompt.direction);
    probe.expect(q && *q == prompt.query, "extract_query failed on prompt " + std::to_string(t));
    parsed += same ? 1 : 0;
  }
  probe.detail = std::to_string(prompts_checked) + " run prompts, 200 self-exclusion cases, " +
                 std::to_string(parsed) + "/1000 parse-backs";
}

// 5. Backend contract ----------------------------------------------------------

void backend_contract(Probe& probe) {
  std::mt19937_64 rng(99);
  int rounds = 0;
  for (int max_inflight : {1, 3, 4, 8}) {
    std::map<std::string, std::string> table;
    std::vector<TranslationRequest> requests;
    const int n = 60;
    for (int i = 0; i < n; ++i) {
      const std::string q = "q" + std::to_string(i);
      table[q] = "answer " + std::to_string(i);
      FewShotPrompt p;
      p.direction = {"fr", "mo"};
      p.query = q;
      requests.push_back({"id" + std::to_string(i), q, render(p), {}});
    }
    MockBackend mock(table);
    std::mutex mu;
    std::map<std::string, int> latency_us;
    for (int i = 0; i < n; ++i) latency_us["q" + std::to_string(i)] = static_cast<int>(rng() % 3000);
    mock.set_latency([&](const std::string& q) {
      std::lock_guard lock(mu);
      return std::chrono::microseconds(latency_us[q]);
    });

    // Expected outcome per query: attempts made and whether it ends ok.
    std::map<std::string, std::pair<int, bool>> expected;
    for (int i = 0; i < n; ++i) {
      const std::string q = "q" + std::to_string(i);
      switch (rng() % 6) {
        case 0: mock.set_fault(q, {1, 0}); expected[q] = {2, true}; break;
        case 1: mock.set_fault(q, {2, 503}); expected[q] = {3, true}; break;
        case 2: mock.set_fault(q, {3, 0}); expected[q] = {3, false}; break;
        case 3: mock.set_fault(q, {5, 400}); expected[q] = {1, false}; break;
        default: expected[q] = {1, true}; break;
      }
    }

    BackendConfig cfg;
    cfg.max_inflight = max_inflight;
    cfg.stop = {"\n"};
    std::mutex sleep_mu;
    std::vector<long> sleeps;
    const Sleeper sleeper = [&](std::chrono::milliseconds d) {
      std::lock_guard lock(sleep_mu);
      sleeps.push_back(d.count());
    };
    const auto results = translate_batch(requests, cfg, mock, sleeper);

    probe.expect(results.size() == requests.size(), "result count");
    for (int i = 0; i < n; ++i) {
      const std::string q = "q" + std::to_string(i);
      const auto& r = results[static_cast<std::size_t>(i)];
      const auto [attempts, ok] = expected[q];
      probe.expect(r.query_id == requests[static_cast<std::size_t>(i)].query_id, "order broken at " + std::to_string(i));
      probe.expect(r.ok() == ok, q + " ok=" + std::to_string(r.ok()));
      probe.expect(r.attempts == attempts, q + " attempts " + std::to_string(r.attempts) + " want " +
                                               std::to_string(attempts));
      probe.expect(mock.calls_for(q) == attempts, q + " backend saw " + std::to_string(mock.calls_for(q)) + " calls");
      if (ok) probe.expect(r.hypothesis == table[q], q + " wrong hypothesis '" + r.hypothesis + "'");
    }
    probe.expect(mock.max_observed_inflight() <= max_inflight,
                 "in-flight " + std::to_string(mock.max_observed_inflight()) + " > " + std::to_string(max_inflight));
    for (long s : sleeps) probe.expect(s == 500 || s == 2000, "unexpected backoff " + std::to_string(s));
    ++rounds;
  }
  probe.detail = std::to_string(rounds) + " batches of 60 with faults, max_inflight in {1,3,4,8}";
}

// 6. Report fidelity -----------------------------------------------------------

std::vector<ReportCell> cells_from(const fs::path& file) {
  return parse_report_cells(nlohmann::json::parse(read_file(file)));
}

std::set<std::string> marked(const ScoreTable& t, bool bold) {
  std::set<std::string> out;
  for (const auto& r : t.rows) {
    for (std::size_t c = 0; c < t.columns.size(); ++c) {
      if (bold ? r.bold[c] : r.underline[c]) out.insert(num(r.values[c], 2));
    }
  }
  return out;
}

void report_fidelity(Probe& probe) {
  const auto t1 = build_score_table(cells_from(g_fixtures / "table1_cells.json"), ReportLayout::bleu_meteor);
  const std::set<std::string> bold1 = {"35.27", "58.10", "53.19", "74.31"};
  const std::set<std::string> under1 = {"52.67", "70.04", "32.83", "50.79", "58.10", "74.31",
                                        "35.25", "53.19", "33.46", "51.77", "56.75", "72.38"};
  probe.expect(marked(t1, true) == bold1, "table 1 bold marks differ");
  probe.expect(marked(t1, false) == under1, "table 1 underline marks differ");
  probe.expect(t1.warnings.empty(), "table 1 produced warnings");

  const auto t2 = build_score_table(cells_from(g_fixtures / "table2_cells.json"), ReportLayout::chrfpp);
  const std::set<std::string> bold2 = {"57.90", "71.89"};
  const std::set<std::string> under2 = {"57.90", "67.05", "68.03", "54.81", "57.32",
                                        "71.89", "55.44", "69.75"};
  probe.expect(marked(t2, true) == bold2, "table 2 bold marks differ");
  probe.expect(marked(t2, false) == under2, "table 2 underline marks differ");

  const std::string text = t1.to_text();
  probe.expect(text.find("**35.27**") != std::string::npos, "bold 35.27 not rendered");
  probe.expect(text.find("**_58.10_**") != std::string::npos, "bold+underline 58.10 not rendered");
  probe.detail = "table 1: 4 bold / 12 underlined; table 2: 2 bold / 8 underlined";
}

// 7. Manifest fidelity ---------------------------------------------------------

void manifest_fidelity(Probe& probe) {
  for (auto label : {ModelLabel::lyra_l, ModelLabel::lyra_g, ModelLabel::lyra_m}) {
    const auto m = generate_training_manifest(label);
    const std::string who(to_string(label));
    probe.expect(m.lora && m.lora->rank == 16 && m.lora->alpha == 16 && m.lora->dropout == 0.0,
                 who + " adapter rank/alpha/dropout");
    probe.expect(m.lora && m.lora->rank_stabilized, who + " rank-stabilized scaling");
    probe.expect(m.lora && m.lora->target_modules ==
                               std::vector<std::string>{"q_proj", "k_proj", "v_proj", "o_proj", "gate_proj",
                                                        "up_proj", "down_proj"},
                 who + " target modules");
    probe.expect(m.batch_size == 48, who + " batch");
    probe.expect(m.warmup_steps == 100, who + " warmup");
    probe.expect(m.weight_decay == 0.01, who + " weight decay");
    probe.expect(m.lr_scheduler == "cosine", who + " schedule");
    probe.expect(m.max_seq_length == 2048, who + " max length");
    probe.expect(m.epochs == 10 && m.early_stopping == "validation_loss", who + " epochs/early stopping");
    probe.expect(m.learning_rate == (label == ModelLabel::lyra_g ? 3e-5 : 1e-5), who + " learning rate");
  }
  const auto nllb = generate_training_manifest(ModelLabel::nllb);
  probe.expect(nllb.learning_rate == 1e-5 && nllb.batch_size == 32, "NLLB lr/batch");
  bool threw = false;
  try {
    parse_model_label("LYRA-X");
  } catch (const ValidationError&) {
    threw = true;
  }
  probe.expect(threw, "unknown label accepted");
  probe.detail = "4 labels";
}

// 8. End-to-end dry run --------------------------------------------------------

void end_to_end(Probe& probe) {
  const LangPair lp{"fr", "mo"};
  const Corpus all = load_corpus(g_fixtures / "corpus50.jsonl", lp);
  probe.expect(all.size() == 50, "fixture has " + std::to_string(all.size()) + " pairs");
  const auto split = split_train_test(all, SplitSpec::random(42, 0.2));
  const fs::path dir = g_scratch / "e2e";
  fs::remove_all(dir);
  fs::create_directories(dir);
  export_corpus(split.train, dir / "train.jsonl");
  export_corpus(split.test, dir / "test.jsonl");
  FallbackEmbedder embedder(128);
  std::vector<std::string> texts, ids;
  for (const auto& p : split.train.pairs()) {
    texts.push_back(p.src);
    ids.push_back(p.id);
  }
  save_index(EmbeddingIndex::build(embed_batch(texts, embedder, ids), {embedder.model_id(), "fixture"}),
             dir / "index.lyra");

  std::vector<RunRecord> records;
  for (const char* direction : {"fr-mo", "mo-fr"}) {
    for (Variant v : {Variant::base, Variant::rag}) {
      nlohmann::json doc{{"name", std::string("e2e-") + std::string(to_string(v)) + "-" + direction},
                         {"model_label", "LYRA-mock"},
                         {"direction", direction},
                         {"variant", to_string(v)},
                         {"corpus", {{"train", "train.jsonl"}, {"test", "test.jsonl"}}},
                         {"output_dir", "runs"}};
      if (v != Variant::base) doc["retrieval"] = {{"index", "index.lyra"}, {"k", 10}};
      write_file(dir / "config.json", doc.dump(2));
      const auto cfg = load_experiment_config(dir / "config.json");
      const auto record = run_experiment(cfg);
      const auto again = run_experiment(cfg);

      const std::string who = std::string(to_string(v)) + " " + direction;
      probe.expect(record.segments.size() == split.test.size(), who + " segment count");
      probe.expect(record.failed_segments == 0, who + " failed segments");
      for (auto kind : cfg.metrics) {
        int seen = 0;
        for (const auto& s : record.scores) seen += s.metric == kind ? 1 : 0;
        probe.expect(seen == 1, who + " metric " + std::string(to_string(kind)) + " appears " + std::to_string(seen));
      }
      const auto* bleu = record.score(MetricKind::bleu);
      probe.expect(bleu != nullptr && bleu->corpus_value == 100.0,
                   who + " identity BLEU " + (bleu ? num(bleu->corpus_value) : std::string("missing")));
      for (const char* f : {"config.json", "hypotheses.txt", "prompts.jsonl", "scores.json", "record.json",
                            "timing.json", "run.log"}) {
        probe.expect(fs::exists(record.directory / f), who + " missing " + f);
      }
      probe.expect(record.to_json().dump() == again.to_json().dump(), who + " record not reproducible");
      probe.expect(read_file(record.directory / "record.json") == record.to_json().dump(2) + "\n",
                   who + " record.json differs from the in-memory record");
      for (const auto& seg : record.segments) {
        probe.expect(seg.example_ids.size() == (v == Variant::base ? 0u : 10u), who + " example count");
      }
      records.push_back(load_run_record(record.directory));
    }
  }
  std::vector<ReportCell> cells;
  for (const auto& r : records) {
    auto more = r.report_cells();
    cells.insert(cells.end(), more.begin(), more.end());
  }
  const auto table = build_score_table(cells, ReportLayout::bleu_meteor);
  probe.expect(table.rows.size() == 2 && table.columns.size() == 4, "report grid shape");
  probe.detail = "train " + std::to_string(split.train.size()) + " / test " + std::to_string(split.test.size()) +
                 ", 4 runs x 2 repetitions";
}

struct Criterion {
  const char* name;
  double budget_s;
  std::function<void(Probe&)> run;
};

}  // namespace

int main(int argc, char** argv) {
  if (argc < 3) {
    std::fprintf(stderr, "usage: %s <fixtures dir> <scratch dir>\n", argv[0]);
    return 2;
  }
  g_fixtures = argv[1];
  g_scratch = argv[2];
  fs::create_directories(g_scratch);
  set_verbosity(Verbosity::quiet);

  const std::vector<Criterion> criteria = {
      {"metric-oracle", 30.0, metric_oracle},
      {"standardization-golden", 5.0, standardization},
      {"retrieval-exactness", 10.0, retrieval},
      {"prompt-contract", 10.0, prompt_contract},
      {"backend-contract", 20.0, backend_contract},
      {"report-fidelity", 5.0, report_fidelity},
      {"manifest-fidelity", 1.0, manifest_fidelity},
      {"end-to-end-dry-run", 30.0, end_to_end},
  };

  int failed = 0;
  for (const auto& c : criteria) {
    Probe probe;
    const auto start = std::chrono::steady_clock::now();
    try {
      c.run(probe);
    } catch (const std::exception& e) {
      probe.failures.push_back(std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (secs > c.budget_s) probe.failures.push_back("took " + num(secs, 2) + " s, budget " + num(c.budget_s, 0) + " s");
    const bool ok = probe.failures.empty();
    failed += ok ? 0 : 1;
    std::printf("%s %-24s %6.2fs/%2.0fs  %s\n", ok ? "PASS" : "FAIL", c.name, secs, c.budget_s, probe.detail.c_str());
    for (const auto& f : probe.failures) std::printf("     - %s\n", f.c_str());
    std::fflush(stdout);
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}

// SPDX-FileCopyrightText: Copyright (c) 2026 The Poutine Authors
// SPDX-License-Identifier: Apache-2.0

#include <fstream>
#include <json.hpp>
#include <sstream>
#include <stdexcept>

#include "poutine/orchestrator.hpp"

namespace poutine {

void WorkerConfig::validate() const {
  bool have_seed_stage = false;
  for (std::size_t s = 0; s < stages.size(); ++s) {
    const Stage& st = stages[s];
    if (std::holds_alternative<BnbStage>(st) && s + 1 != stages.size()) {
      throw std::invalid_argument("worker " + std::to_string(id) + ": BnB must be the last stage");
    }
    if (std::holds_alternative<RlbStage>(st) && !have_seed_stage) {
      throw std::invalid_argument("worker " + std::to_string(id) +
                                  ": RLB needs a preceding dive or FP stage");
    }
    if (std::holds_alternative<DiveStage>(st) || std::holds_alternative<FpStage>(st)) {
      have_seed_stage = true;
    }
    if (const auto* f = std::get_if<FpStage>(&st)) f->config.validate();
  }
}

std::string WorkerConfig::describe() const {
  std::ostringstream out;
  for (std::size_t s = 0; s < stages.size(); ++s) {
    if (s > 0) out << '+';
    const Stage& st = stages[s];
    if (const auto* d = std::get_if<DiveStage>(&st)) {
      out << "D" << (static_cast<int>(d->rule.kind) + 1);
      if (d->rule.kind == DiveKind::Dive3) out << "(seed " << d->rule.seed << ")";
    } else if (const auto* f = std::get_if<FpStage>(&st)) {
      out << "FP(nT=" << f->config.max_iterations << ",FP_T=" << f->config.perturb_period
          << ",alpha=" << f->config.alpha << ")";
    } else if (const auto* r = std::get_if<RlbStage>(&st)) {
      out << "RLB(k=" << r->k << ")";
    } else if (std::holds_alternative<RandomStage>(st)) {
      out << "RNDM";
    } else {
      out << "BnB";
    }
  }
  return out.str();
}

namespace {

FpStage fp(double alpha, std::uint64_t seed) {
  FPConfig c;
  c.alpha = alpha;
  c.max_iterations = 10;
  c.perturb_period = 20;
  c.seed = seed;
  return FpStage{c};
}

DiveStage dive_stage(DiveKind kind, std::uint64_t seed = 0) { return DiveStage{DiveRule{kind, seed}}; }

std::vector<Stage> default_worker_stages(int slot, std::uint64_t seed) {
  const std::uint64_t bnb_seed = seed + static_cast<std::uint64_t>(slot);
  switch (slot) {
    case 0: return {dive_stage(DiveKind::Dive1), BnbStage{bnb_seed}};
    case 1: return {dive_stage(DiveKind::Dive2), BnbStage{bnb_seed}};
    case 2: return {dive_stage(DiveKind::Dive3, 100 + seed), RlbStage{}, BnbStage{bnb_seed}};
    case 3: return {dive_stage(DiveKind::Dive3, 200 + seed), BnbStage{bnb_seed}};
    case 4: return {fp(0.4, seed + 4), BnbStage{bnb_seed}};
    case 5: return {fp(0.9, seed + 5), RlbStage{}, BnbStage{bnb_seed}};
    case 6: return {fp(0.4, seed + 6), RlbStage{}, BnbStage{bnb_seed}};
    default: return {RandomStage{seed + 7}};
  }
}

}  // namespace

std::vector<WorkerConfig> default_portfolio(int thread_count, std::uint64_t seed) {
  if (thread_count < 1) throw std::invalid_argument("thread count must be at least 1");
  std::vector<WorkerConfig> out;
  for (int t = 0; t < thread_count; ++t) {
    // Cycled copies get shifted seeds so they do not repeat the same search.
    const std::uint64_t shift = seed + 1000ULL * static_cast<std::uint64_t>(t / 8);
    out.push_back(WorkerConfig{t, default_worker_stages(t % 8, shift)});
  }
  return out;
}

namespace {

using nlohmann::json;

DiveKind dive_kind(const json& v) {
  if (v.is_number_integer()) {
    const int k = v.get<int>();
    if (k >= 1 && k <= 3) return static_cast<DiveKind>(k - 1);
  } else if (v.is_string()) {
    const auto s = v.get<std::string>();
    if (s == "dive1" || s == "D1") return DiveKind::Dive1;
    if (s == "dive2" || s == "D2") return DiveKind::Dive2;
    if (s == "dive3" || s == "D3") return DiveKind::Dive3;
  }
  throw std::invalid_argument("unknown dive rule " + v.dump());
}

Stage parse_stage(const json& j) {
  const auto type = j.at("type").get<std::string>();
  if (type == "dive") {
    DiveStage d;
    d.rule.kind = dive_kind(j.at("rule"));
    d.rule.seed = j.value("seed", std::uint64_t{0});
    d.max_dives = j.value("max_dives", kUnlimitedDives);
    return d;
  }
  if (type == "fp") {
    FpStage f;
    f.config.alpha = j.value("alpha", 0.4);
    f.config.max_iterations = j.value("nT", 10L);
    f.config.perturb_period = j.value("FP_T", 20L);
    f.config.seed = j.value("seed", std::uint64_t{0});
    return f;
  }
  if (type == "rlb") return RlbStage{j.value("k", 10)};
  if (type == "random") return RandomStage{j.value("seed", std::uint64_t{0})};
  if (type == "bnb") return BnbStage{j.value("seed", std::uint64_t{0})};
  throw std::invalid_argument("unknown stage type " + type);
}

}  // namespace

std::vector<WorkerConfig> parse_portfolio_json(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw std::invalid_argument(std::string("portfolio is not valid JSON: ") + e.what());
  }
  const json& workers = doc.is_array() ? doc : doc.at("workers");
  std::vector<WorkerConfig> out;
  try {
    for (const json& w : workers) {
      WorkerConfig cfg;
      cfg.id = static_cast<int>(out.size());
      for (const json& s : w.at("stages")) cfg.stages.push_back(parse_stage(s));
      cfg.validate();
      out.push_back(std::move(cfg));
    }
  } catch (const json::exception& e) {
    throw std::invalid_argument(std::string("bad portfolio: ") + e.what());
  }
  if (out.empty()) throw std::invalid_argument("portfolio has no workers");
  return out;
}

std::vector<WorkerConfig> load_portfolio(std::string_view preset_or_path, int thread_count,
                                         std::uint64_t seed) {
  if (preset_or_path.empty() || preset_or_path == "default") return default_portfolio(thread_count, seed);
  std::ifstream in{std::string(preset_or_path)};
  if (!in) throw std::invalid_argument("unknown portfolio preset or file: " + std::string(preset_or_path));
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_portfolio_json(buf.str());
}

}  // namespace poutine

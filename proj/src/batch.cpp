#include "investesg/batch.hpp"

#include <cmath>
#include <exception>
#include <random>
#include <thread>

namespace investesg {

Aggregate aggregate(const std::vector<double>& values) {
  Aggregate a;
  if (values.empty()) return a;
  double sum = 0.0;
  for (double v : values) sum += v;
  const double n = static_cast<double>(values.size());
  a.mean = sum / n;
  if (values.size() > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - a.mean) * (v - a.mean);
    a.std_error = std::sqrt(ss / (n - 1.0)) / std::sqrt(n);
  }
  return a;
}

BatchResult summarize(std::vector<SeedPair> seeds, std::vector<EpisodeSummary> episodes) {
  BatchResult r;
  r.seeds = std::move(seeds);
  r.episodes = std::move(episodes);
  std::vector<double> risk, wealth, events, failures, mitigation;
  for (const auto& s : r.episodes) {
    risk.push_back(s.final_risk);
    wealth.push_back(s.final_wealth);
    events.push_back(s.events_total);
    failures.push_back(s.bankruptcies);
    mitigation.push_back(s.cumulative_mitigation);
  }
  r.final_risk = aggregate(risk);
  r.final_wealth = aggregate(wealth);
  r.events_total = aggregate(events);
  r.bankruptcies = aggregate(failures);
  r.cumulative_mitigation = aggregate(mitigation);
  return r;
}

std::vector<SeedPair> consecutive_seeds(SeedPair base, int count) {
  std::vector<SeedPair> out;
  for (int k = 0; k < count; ++k)
    out.push_back({base.climate + static_cast<std::uint64_t>(k), base.policy + static_cast<std::uint64_t>(k)});
  return out;
}

namespace {

// Runs fn(begin, end) over contiguous chunks of [0, n) on up to `threads`
// threads and rethrows the first failure.
template <class Fn>
void parallel_chunks(std::size_t n, int threads, Fn fn) {
  const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(static_cast<std::size_t>(threads), n));
  if (workers <= 1) {
    fn(std::size_t{0}, n);
    return;
  }
  const std::size_t chunk = (n + workers - 1) / workers;
  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    const std::size_t begin = w * chunk;
    const std::size_t end = std::min(n, begin + chunk);
    if (begin >= end) break;
    pool.emplace_back([&, w, begin, end] {
      try {
        fn(begin, end);
      } catch (...) {
        errors[w] = std::current_exception();
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace

struct BatchStepper::Impl {
  ScenarioConfig config;
  market::MarketParams params;
  const simd::KernelTable* k = nullptr;
  std::size_t M = 0, N = 0, B = 0;
  int period = 0;
  bool record_rows = false;
  simd::RiskCoeffs coeffs{};
  std::vector<policies::ScriptedCompanyPolicy> company_policy;
  std::vector<policies::ScriptedInvestorPolicy> investor_policy;

  std::vector<SeedPair> seeds;
  std::vector<ClimateStream> streams;
  std::vector<double> seeded_fraction;

  // Company arrays, index i*B + b.
  std::vector<double> capital, esg, vulnerability, resilience_stock, bankrupt, active;
  std::vector<double> mitigation, greenwash, resilience;
  std::vector<double> interim, withdrawn, invested, ratio, loss, margin, next_capital, reward, returns, tmp;
  std::vector<double> history;  // 3 slots per company lane, oldest first
  std::vector<int> history_len;

  // Investor arrays, index j*B + b; holdings and flags (j*M + i)*B + b.
  std::vector<double> holdings, flags, held;
  std::vector<double> cash, share, next_cash, capital_before, capital_after, weighted, inv_reward, inv_returns;

  // Lane arrays.
  std::vector<double> cumulative, heat, precip, drought, u_heat, u_precip, u_drought, x_heat, x_precip, x_drought,
      count;
  std::vector<int> events_total;

  std::vector<std::vector<PeriodRow>> rows;

  [[nodiscard]] std::size_t ci(std::size_t i, std::size_t b) const { return i * B + b; }
  [[nodiscard]] std::size_t ji(std::size_t j, std::size_t b) const { return j * B + b; }
  [[nodiscard]] std::size_t hi(std::size_t j, std::size_t i, std::size_t b) const { return (j * M + i) * B + b; }
  double* company_lanes(std::vector<double>& v, std::size_t i) { return v.data() + i * B; }
  double* investor_lanes(std::vector<double>& v, std::size_t j) { return v.data() + j * B; }
  double* holding_lanes(std::vector<double>& v, std::size_t j, std::size_t i) { return v.data() + (j * M + i) * B; }

  void init() {
    const std::size_t mb = M * B;
    const std::size_t nb = N * B;
    const std::size_t nmb = N * M * B;
    for (auto* v : {&capital, &esg, &vulnerability, &resilience_stock, &bankrupt, &active, &mitigation, &greenwash,
                    &resilience, &interim, &withdrawn, &invested, &ratio, &loss, &margin, &next_capital, &reward,
                    &returns, &tmp})
      v->assign(mb, 0.0);
    history.assign(mb * market::kStrictWindow, 0.0);
    history_len.assign(mb, 0);
    for (auto* v : {&holdings, &flags, &held}) v->assign(nmb, 0.0);
    for (auto* v : {&cash, &share, &next_cash, &capital_before, &capital_after, &weighted, &inv_reward,
                    &inv_returns})
      v->assign(nb, 0.0);
    for (auto* v : {&cumulative, &heat, &precip, &drought, &u_heat, &u_precip, &u_drought, &x_heat, &x_precip,
                    &x_drought, &count})
      v->assign(B, 0.0);
    events_total.assign(B, 0);

    const auto state = initial_state(config);
    for (std::size_t i = 0; i < M; ++i) {
      const auto& c = state.companies[i];
      for (std::size_t b = 0; b < B; ++b) {
        capital[ci(i, b)] = c.capital;
        vulnerability[ci(i, b)] = c.vulnerability;
      }
    }
    for (std::size_t j = 0; j < N; ++j)
      for (std::size_t b = 0; b < B; ++b) cash[ji(j, b)] = state.investors[j].cash;
    for (std::size_t b = 0; b < B; ++b) {
      heat[b] = state.risks.heat;
      precip[b] = state.risks.precip;
      drought[b] = state.risks.drought;
    }
    for (std::size_t e = 0; e < 3; ++e) {
      coeffs.base[e] = params.climate.base[e];
      coeffs.growth[e] = params.climate.growth[e];
      coeffs.elasticity[e] = params.climate.elasticity[e];
    }

    streams.reserve(B);
    seeded_fraction.assign(B, 0.0);
    const auto& seeding = config.features.real_data_seeding;
    for (std::size_t b = 0; b < B; ++b) {
      streams.emplace_back(seeds[b].climate, config.horizon, M, config.features.gaussian_damage.enabled);
      if (seeding.enabled) {
        PolicyRng rng = make_policy_rng(seeds[b].policy);
        std::uniform_real_distribution<double> draw(seeding.low, seeding.high);
        seeded_fraction[b] = draw(rng);
      }
    }
    rows.assign(record_rows ? B : 0, {});
  }

  void choose_actions() {
    const auto& seeding = config.features.real_data_seeding;
    const bool seeding_window = seeding.enabled && period < seeding.periods;
    const std::size_t seeded = seeded_company_count(M);
    for (std::size_t i = 0; i < M; ++i) {
      const auto base = company_policy[i].fractions();
      for (std::size_t b = 0; b < B; ++b) {
        const std::size_t x = ci(i, b);
        if (bankrupt[x] != 0.0) {
          mitigation[x] = greenwash[x] = resilience[x] = 0.0;
          continue;
        }
        mitigation[x] = seeding_window && i < seeded ? seeded_fraction[b] : base.mitigation;
        greenwash[x] = params.greenwash_enabled ? base.greenwash : 0.0;
        resilience[x] = params.resilience_enabled ? base.resilience : 0.0;
      }
    }
    std::vector<double> disclosed(M);
    auto alive = std::make_unique<bool[]>(M);
    for (std::size_t b = 0; b < B; ++b) {
      for (std::size_t i = 0; i < M; ++i) {
        const bool up = bankrupt[ci(i, b)] == 0.0;
        alive[i] = up;
        disclosed[i] = params.disclosure && up ? esg[ci(i, b)] : 0.0;
      }
      for (std::size_t j = 0; j < N; ++j) {
        const auto a = policies::investor_action(investor_policy[j], disclosed, std::span<const bool>(alive.get(), M));
        for (std::size_t i = 0; i < M; ++i) flags[hi(j, i, b)] = a.invest[i] != 0 && alive[i] ? 1.0 : 0.0;
      }
    }
  }

  void redistribute() {
    for (std::size_t j = 0; j < N; ++j) {
      double* kb = investor_lanes(capital_before, j);
      std::fill(kb, kb + B, 0.0);
      for (std::size_t i = 0; i < M; ++i) k->accumulate(kb, holding_lanes(holdings, j, i), B);
      k->accumulate(kb, investor_lanes(cash, j), B);
      for (std::size_t b = 0; b < B; ++b) {
        int chosen = 0;
        for (std::size_t i = 0; i < M; ++i) chosen += flags[hi(j, i, b)] != 0.0 ? 1 : 0;
        const std::size_t x = ji(j, b);
        if (chosen == 0) {
          share[x] = 0.0;
          next_cash[x] = capital_before[x];
        } else {
          share[x] = capital_before[x] / chosen;
          next_cash[x] = 0.0;
        }
      }
    }
    for (std::size_t i = 0; i < M; ++i) {
      double* w = company_lanes(withdrawn, i);
      double* v = company_lanes(invested, i);
      std::fill(w, w + B, 0.0);
      std::fill(v, v + B, 0.0);
      for (std::size_t j = 0; j < N; ++j) {
        k->accumulate(w, holding_lanes(holdings, j, i), B);
        k->accumulate_masked(v, holding_lanes(flags, j, i), investor_lanes(share, j), B);
      }
      k->interim(company_lanes(capital, i), w, v, company_lanes(interim, i), B);
    }
  }

  void spend() {
    for (std::size_t x = 0; x < M * B; ++x) active[x] = bankrupt[x] == 0.0 ? 1.0 : 0.0;
    for (std::size_t i = 0; i < M; ++i) {
      for (std::size_t b = 0; b < B; ++b) {
        const std::size_t x = ci(i, b);
        if (active[x] == 0.0) continue;
        if (mitigation[x] + greenwash[x] + resilience[x] > 1.0) {
          bankrupt[x] = 1.0;
          mitigation[x] = greenwash[x] = resilience[x] = 0.0;
        }
      }
      double* cap = company_lanes(interim, i);
      double* m = company_lanes(mitigation, i);
      double* r = company_lanes(resilience, i);
      k->accumulate_product(cumulative.data(), m, cap, B);
      k->resilience_ratio(company_lanes(resilience_stock, i), r, cap, company_lanes(ratio, i), B);
      k->esg(m, company_lanes(greenwash, i), params.greenwash_coeff, company_lanes(tmp, i), B);
      for (std::size_t b = 0; b < B; ++b) {
        const std::size_t x = ci(i, b);
        if (active[x] == 0.0 || bankrupt[x] != 0.0) continue;
        if (!(interim[x] > 0.0)) throw market::InvariantViolation("active company with non-positive interim capital");
        vulnerability[x] = config.initial_vulnerability * std::exp(-config.resilience_efficiency * ratio[x]);
        esg[x] = params.disclosure ? tmp[x] : 0.0;
      }
      k->accumulate_product(company_lanes(resilience_stock, i), r, cap, B);
    }
  }

  void climate_and_margins() {
    k->update_risks(static_cast<double>(period + 1), cumulative.data(), coeffs, heat.data(), precip.data(),
                    drought.data(), B);
    for (std::size_t b = 0; b < B; ++b) {
      const auto u = streams[b].uniforms(period);
      u_heat[b] = u[0];
      u_precip[b] = u[1];
      u_drought[b] = u[2];
    }
    k->sample_events(heat.data(), precip.data(), drought.data(), u_heat.data(), u_precip.data(), u_drought.data(),
                     x_heat.data(), x_precip.data(), x_drought.data(), count.data(), B);
    for (std::size_t b = 0; b < B; ++b) events_total[b] += static_cast<int>(count[b]);

    for (std::size_t i = 0; i < M; ++i) {
      double* l = company_lanes(loss, i);
      if (params.gaussian_damage) {
        for (std::size_t b = 0; b < B; ++b) {
          const std::size_t x = ci(i, b);
          if (bankrupt[x] != 0.0) {
            l[b] = 0.0;
            continue;
          }
          const auto normals = streams[b].normals(period).subspan(i * climate::kNumEvents, climate::kNumEvents);
          l[b] = market::event_loss(lane_events(b), vulnerability[x], normals, params.damage_sigma);
        }
      } else {
        k->event_loss(count.data(), company_lanes(vulnerability, i), l, B);
      }
      double* mg = company_lanes(margin, i);
      k->margins(company_lanes(mitigation, i), company_lanes(greenwash, i), company_lanes(resilience, i), l,
                 params.growth_rate, mg, B);
      for (std::size_t b = 0; b < B; ++b)
        if (bankrupt[ci(i, b)] != 0.0) mg[b] = 0.0;
    }
  }

  [[nodiscard]] climate::EventOutcome lane_events(std::size_t b) const {
    climate::EventOutcome e;
    e.heat = x_heat[b] != 0.0;
    e.precip = x_precip[b] != 0.0;
    e.drought = x_drought[b] != 0.0;
    e.count = static_cast<int>(count[b]);
    return e;
  }

  void settle() {
    for (std::size_t i = 0; i < M; ++i) {
      k->grow(company_lanes(margin, i), company_lanes(interim, i), company_lanes(next_capital, i), B);
      for (std::size_t b = 0; b < B; ++b) {
        const std::size_t x = ci(i, b);
        if (bankrupt[x] != 0.0) {
          capital[x] = 0.0;
        } else if (next_capital[x] <= 0.0) {
          bankrupt[x] = 1.0;
          capital[x] = 0.0;
        } else {
          capital[x] = next_capital[x];
        }
      }
    }
    for (std::size_t j = 0; j < N; ++j) {
      for (std::size_t i = 0; i < M; ++i) {
        double* f = holding_lanes(held, j, i);
        const double* a = holding_lanes(flags, j, i);
        for (std::size_t b = 0; b < B; ++b) f[b] = a[b] != 0.0 && bankrupt[ci(i, b)] == 0.0 ? 1.0 : 0.0;
        k->grow_masked(f, company_lanes(margin, i), investor_lanes(share, j), holding_lanes(holdings, j, i), B);
      }
      std::copy_n(investor_lanes(next_cash, j), B, investor_lanes(cash, j));
    }
  }

  void rewards() {
    for (std::size_t i = 0; i < M; ++i) {
      double* r = company_lanes(reward, i);
      k->subtract(company_lanes(capital, i), company_lanes(interim, i), r, B);
      for (std::size_t b = 0; b < B; ++b)
        if (active[ci(i, b)] == 0.0) r[b] = 0.0;
      k->accumulate(company_lanes(returns, i), r, B);
    }
    for (std::size_t j = 0; j < N; ++j) {
      double* ka = investor_lanes(capital_after, j);
      double* wq = investor_lanes(weighted, j);
      std::fill(ka, ka + B, 0.0);
      std::fill(wq, wq + B, 0.0);
      for (std::size_t i = 0; i < M; ++i) {
        k->accumulate(ka, holding_lanes(holdings, j, i), B);
        k->accumulate_product(wq, holding_lanes(holdings, j, i), company_lanes(esg, i), B);
      }
      k->accumulate(ka, investor_lanes(cash, j), B);
      const double alpha = config.esg_preference_of(j);
      for (std::size_t b = 0; b < B; ++b) {
        const std::size_t x = ji(j, b);
        const double before = capital_before[x];
        const double after = capital_after[x];
        double r = 0.0;
        if (before > 0.0) {
          r = (after - before) / before;
          if (after > 0.0 && alpha != 0.0) r = r + alpha * (weighted[x] / after);
        }
        inv_reward[x] = r;
      }
      k->accumulate(investor_lanes(inv_returns, j), investor_lanes(inv_reward, j), B);
    }
  }

  void strict_rule() {
    for (std::size_t i = 0; i < M; ++i) {
      for (std::size_t b = 0; b < B; ++b) {
        const std::size_t x = ci(i, b);
        if (bankrupt[x] != 0.0) continue;
        double* h = history.data() + x * market::kStrictWindow;
        if (history_len[x] < static_cast<int>(market::kStrictWindow)) {
          h[history_len[x]++] = margin[x];
        } else {
          for (std::size_t s = 1; s < market::kStrictWindow; ++s) h[s - 1] = h[s];
          h[market::kStrictWindow - 1] = margin[x];
        }
        if (!params.strict_bankruptcy) continue;
        if (market::check_strict_bankruptcy(
                std::span<const double>(h, static_cast<std::size_t>(history_len[x])))) {
          bankrupt[x] = 1.0;
          capital[x] = 0.0;
          for (std::size_t j = 0; j < N; ++j) holdings[hi(j, i, b)] = 0.0;
        }
      }
    }
  }

  void record() {
    for (std::size_t b = 0; b < B; ++b) {
      PeriodRow row;
      row.t = period + 1;
      row.risks = {heat[b], precip[b], drought[b]};
      row.overall_risk = climate::overall_risk(row.risks);
      row.events = lane_events(b);
      row.companies.resize(M);
      for (std::size_t i = 0; i < M; ++i) {
        const std::size_t x = ci(i, b);
        row.companies[i] = CompanyRow{capital[x],
                                      esg[x],
                                      vulnerability[x],
                                      {mitigation[x], greenwash[x], resilience[x]},
                                      reward[x],
                                      bankrupt[x] != 0.0};
      }
      row.investors.resize(N);
      for (std::size_t j = 0; j < N; ++j) {
        auto& inv = row.investors[j];
        inv.holdings.resize(M);
        for (std::size_t i = 0; i < M; ++i) inv.holdings[i] = holdings[hi(j, i, b)];
        inv.cash = cash[ji(j, b)];
        inv.reward = inv_reward[ji(j, b)];
      }
      rows[b].push_back(std::move(row));
    }
  }

  void step() {
    if (period >= config.horizon)
      throw market::EpisodeCompleteError("batch already reached its horizon of " + std::to_string(config.horizon) +
                                         " periods");
    choose_actions();
    redistribute();
    spend();
    climate_and_margins();
    settle();
    rewards();
    strict_rule();
    if (record_rows) record();
    ++period;
  }

  [[nodiscard]] EpisodeSummary summary(std::size_t b) const {
    EpisodeSummary s;
    s.periods = period;
    s.final_risk = climate::overall_risk({heat[b], precip[b], drought[b]});
    double total = 0.0;
    for (std::size_t i = 0; i < M; ++i) total += capital[ci(i, b)];
    for (std::size_t j = 0; j < N; ++j) total += cash[ji(j, b)];
    s.final_wealth = total;
    s.events_total = events_total[b];
    for (std::size_t i = 0; i < M; ++i) s.bankruptcies += bankrupt[ci(i, b)] != 0.0 ? 1 : 0;
    s.cumulative_mitigation = cumulative[b];
    for (std::size_t i = 0; i < M; ++i) s.company_returns.push_back(returns[ci(i, b)]);
    for (std::size_t j = 0; j < N; ++j) s.investor_returns.push_back(inv_returns[ji(j, b)]);
    return s;
  }
};

BatchStepper::BatchStepper(const ScenarioConfig& config, std::vector<SeedPair> seeds,
                           const simd::KernelTable& kernels, bool record_rows)
    : impl_(std::make_unique<Impl>()) {
  config.validate();
  if (seeds.empty()) throw std::invalid_argument("batch needs at least one seed");
  auto& s = *impl_;
  s.config = config;
  s.params = market_params(config);
  s.k = &kernels;
  s.M = static_cast<std::size_t>(config.num_companies);
  s.N = static_cast<std::size_t>(config.num_investors);
  s.B = seeds.size();
  s.record_rows = record_rows;
  s.seeds = std::move(seeds);
  s.company_policy = company_policies(config);
  s.investor_policy = investor_policies(config);
  s.init();
}

BatchStepper::~BatchStepper() = default;

bool BatchStepper::done() const { return impl_->period >= impl_->config.horizon; }
void BatchStepper::step() { impl_->step(); }
void BatchStepper::run() {
  while (!done()) step();
}
std::size_t BatchStepper::lanes() const { return impl_->B; }
EpisodeSummary BatchStepper::summary(std::size_t lane) const { return impl_->summary(lane); }

EpisodeRecord BatchStepper::take_record(std::size_t lane) {
  EpisodeRecord r;
  r.seeds = impl_->seeds.at(lane);
  r.summary = impl_->summary(lane);
  if (impl_->record_rows) r.rows = std::move(impl_->rows[lane]);
  return r;
}

BatchResult run_batch(const ScenarioConfig& config, const std::vector<SeedPair>& seeds, const BatchOptions& options) {
  config.validate();
  if (seeds.empty()) throw std::invalid_argument("batch needs at least one seed");
  const simd::KernelTable& kernels = options.isa ? simd::kernels_for(*options.isa) : simd::active_kernels();
  std::vector<EpisodeSummary> summaries(seeds.size());
  std::vector<EpisodeRecord> records(options.record_rows ? seeds.size() : 0);
  parallel_chunks(seeds.size(), options.threads, [&](std::size_t begin, std::size_t end) {
    BatchStepper stepper(config, std::vector<SeedPair>(seeds.begin() + begin, seeds.begin() + end), kernels,
                         options.record_rows);
    stepper.run();
    for (std::size_t b = 0; b < end - begin; ++b) {
      summaries[begin + b] = stepper.summary(b);
      if (options.record_rows) records[begin + b] = stepper.take_record(b);
    }
  });
  auto result = summarize(seeds, std::move(summaries));
  result.records = std::move(records);
  return result;
}

BatchResult run_sequential(const ScenarioConfig& config, const std::vector<SeedPair>& seeds,
                           const std::function<std::unique_ptr<Controller>()>& factory, int threads,
                           bool record_rows) {
  config.validate();
  if (seeds.empty()) throw std::invalid_argument("batch needs at least one seed");
  std::vector<EpisodeSummary> summaries(seeds.size());
  std::vector<EpisodeRecord> records(record_rows ? seeds.size() : 0);
  parallel_chunks(seeds.size(), threads, [&](std::size_t begin, std::size_t end) {
    for (std::size_t e = begin; e < end; ++e) {
      auto controller = factory();
      auto record = run_episode(config, seeds[e], *controller, record_rows);
      summaries[e] = record.summary;
      if (record_rows) records[e] = std::move(record);
    }
  });
  auto result = summarize(seeds, std::move(summaries));
  result.records = std::move(records);
  return result;
}

}  // namespace investesg

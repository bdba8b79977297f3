#include "homesim/engine.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <fstream>
#include <mutex>
#include <thread>

#include <fmt/chrono.h>
#include <fmt/format.h>

namespace homesim {

namespace {

constexpr std::int64_t kChunkSize = 1024;

std::string fnv1a_hex(const std::string& text)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return fmt::format("{:016x}", h);
}

std::string utc_timestamp()
{
    return fmt::format("{:%Y-%m-%dT%H:%M:%SZ}", fmt::gmtime(std::chrono::system_clock::to_time_t(
                                                    std::chrono::system_clock::now())));
}

bool valid_fraction(double x)
{
    return x > 0.0 && x <= 1.0;
}

void require_fractions(const std::vector<double>& xs, const char* name)
{
    if (xs.empty())
        throw ConfigError(fmt::format("{} must not be empty", name));
    for (double x : xs)
        if (!valid_fraction(x))
            throw ConfigError(fmt::format("{} entries must be in (0, 1], got {}", name, x));
}

int worker_count(int requested, std::int64_t chunks)
{
    int n = requested > 0 ? requested : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    return static_cast<int>(std::max<std::int64_t>(1, std::min<std::int64_t>(n, chunks)));
}

/// Runs `work(chunk)` for chunks [0, n) on `threads` workers; the first
/// exception stops the pool and is rethrown.
template <typename Work>
void parallel_chunks(std::int64_t n, int threads, Work&& work)
{
    std::atomic<std::int64_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto body = [&] {
        while (!failed.load(std::memory_order_relaxed)) {
            const std::int64_t chunk = next.fetch_add(1);
            if (chunk >= n)
                return;
            try {
                work(chunk);
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error)
                    error = std::current_exception();
                failed = true;
            }
        }
    };
    {
        std::vector<std::jthread> pool;
        for (int k = 1; k < threads; ++k)
            pool.emplace_back(body);
        body();
    }
    if (error)
        std::rethrow_exception(error);
}

} // namespace

void RunConfig::validate() const
{
    if (households < 1)
        throw ConfigError("households must be at least 1");
    if (threads < 0)
        throw ConfigError("threads must be non-negative");
    require_fractions(down_fracs, "down_fracs");
    require_fractions(threshold_fracs, "threshold_fracs");
    if (second_home) {
        require_fractions(second_down_fracs, "second_down_fracs");
        require_fractions(second_threshold_fracs, "second_threshold_fracs");
    }
    if (std::find(down_fracs.begin(), down_fracs.end(), base_down) == down_fracs.end() ||
        std::find(threshold_fracs.begin(), threshold_fracs.end(), base_threshold) == threshold_fracs.end())
        throw ConfigError(fmt::format("base strategy {}/{} is not on the grid", base_down, base_threshold));
    if (!(replacement > 0.0 && replacement <= 1.0))
        throw ConfigError(fmt::format("replacement must be in (0, 1], got {}", replacement));
    if (!(income_target > 0.0))
        throw ConfigError("income_target must be positive");
    if (!(hpi_anchor_value > 0.0))
        throw ConfigError("hpi_anchor_value must be positive");
    if (comparison_paths < 1)
        throw ConfigError("comparison_paths must be at least 1");
    if (dump_trajectories < 0)
        throw ConfigError("dump_trajectories must be non-negative");
}

std::string RunConfig::canonical() const
{
    return fmt::format("countries={};households={};seed={};down={};threshold={};second_home={};second_down={};"
                       "second_threshold={};base={}/{};replacement={};income_target={};hpi_anchor={}:{};"
                       "comparison_paths={}",
                       countries, households, seed, fmt::join(down_fracs, ","), fmt::join(threshold_fracs, ","),
                       second_home, fmt::join(second_down_fracs, ","), fmt::join(second_threshold_fracs, ","),
                       base_down, base_threshold, replacement, income_target, hpi_anchor_year, hpi_anchor_value,
                       comparison_paths);
}

std::string RunConfig::hash() const
{
    return fnv1a_hex(canonical());
}

ModelInputs load_inputs(const RunConfig& config)
{
    // Rescale against the reference country before any country filter applies.
    auto loaded = load_panel(config.data_dir);
    MacroPanel panel = rescale_hpi(std::move(loaded.panel), config.hpi_anchor_year, config.hpi_anchor_value);
    if (!config.countries.empty()) {
        const auto keep = expand_country_list(config.countries);
        for (const auto& code : keep)
            if (!panel.find(code))
                throw DataError(fmt::format("country {} is not in the retained panel", code));
        std::erase_if(panel.countries, [&](const CountrySeries& s) { return !keep.contains(s.country_code); });
    }
    if (panel.countries.empty())
        throw DataError("no countries left to sample from");

    const auto dir = std::filesystem::is_directory(config.data_dir) ? config.data_dir
                                                                     : config.data_dir.parent_path();
    IncomeProcess income;
    income.level_factor = calibrate_level_factor(income, config.income_target);
    std::string fingerprint = panel_fingerprint(panel);
    return ModelInputs{std::move(panel), load_life_table(dir / "life_table.csv"),
                       load_plf_table(dir / "plf_table.csv"), income, std::move(fingerprint)};
}

HouseholdDraw draw_household(const ModelInputs& inputs, std::uint64_t seed, std::uint64_t index)
{
    HouseholdDraw d;
    auto rng_lm = substream(seed, index, Stream::lifespan_male);
    d.lifespans.death_age_male = simulate_lifespan(Sex::male, inputs.life_table, rng_lm);
    auto rng_lf = substream(seed, index, Stream::lifespan_female);
    d.lifespans.death_age_female = simulate_lifespan(Sex::female, inputs.life_table, rng_lf);

    auto rng_im = substream(seed, index, Stream::income_male);
    d.male = simulate_income_path(draw_individual_params(inputs.income, rng_im), inputs.income, rng_im);
    auto rng_if = substream(seed, index, Stream::income_female);
    d.female = simulate_income_path(draw_individual_params(inputs.income, rng_if), inputs.income, rng_if);

    auto rng_e = substream(seed, index, Stream::economy);
    d.path = sample_path(inputs.panel, rng_e);
    return d;
}

SimulationParams simulation_params(const ModelInputs& inputs, const RunConfig& config)
{
    SimulationParams p;
    p.replacement = config.replacement;
    p.plf = &inputs.plf;
    return p;
}

double CellResult::mean(const std::array<double, 2>& sums, int arm, std::int64_t n) const
{
    return n > 0 ? sums[static_cast<std::size_t>(arm)] / static_cast<double>(n) : 0.0;
}

std::optional<double> CellResult::change(const std::array<double, 2>& sums, std::int64_t n) const
{
    if (n <= 0 || !(sums[1] > 0.0))
        return std::nullopt;
    return sums[0] / sums[1] - 1.0;
}

namespace {

/// Equivalent-wealth views of one arm.
struct ArmWelfare
{
    double post = 0.0, pre = 0.0, lifetime = 0.0, bequest = 0.0;
    std::optional<double> consumption;
};

ArmWelfare welfare_of(const ArmOutcome& arm, const UtilityParams& u)
{
    ArmWelfare w;
    const double beq = arm.utility_bequest;
    w.post = equivalent_wealth(arm.utility_post + beq, u);
    w.pre = equivalent_wealth(arm.utility_pre + (arm.reached_retirement ? 0.0 : beq), u);
    w.lifetime = equivalent_wealth(arm.utility_pre + arm.utility_post + beq, u);
    w.bequest = equivalent_wealth(beq, u);
    if (arm.reached_retirement)
        w.consumption = equivalent_wealth(arm.utility_post, u);
    return w;
}

struct CellAccumulator
{
    CellResult result;
    std::array<std::vector<double>, 2> retirement_wealth;

    void add(const ArmOutcome& a, const ArmOutcome& b, const UtilityParams& u, bool keep_gini, bool counts_of_b)
    {
        auto& r = result;
        const ArmOutcome* arms[2] = {&a, &b};
        ++r.purchased;
        for (int k = 0; k < 2; ++k) {
            const auto& arm = *arms[k];
            const auto w = welfare_of(arm, u);
            r.wealth_death[k] += arm.terminal_wealth;
            r.financial_death[k] += arm.terminal_financial;
            r.v_post[k] += w.post;
            r.v_pre[k] += w.pre;
            r.v_lifetime[k] += w.lifetime;
            r.v_bequest[k] += w.bequest;
            r.mdd_lifetime[k] += arm.mdd_lifetime();
            r.mdd_pre[k] += arm.mdd_pre();
            if (arm.reached_retirement) {
                r.wealth_retirement[k] += arm.wealth_at_retirement;
                r.financial_retirement[k] += arm.financial_at_retirement;
                r.v_consumption[k] += *w.consumption;
                r.mdd_post[k] += *arm.mdd_post();
                if (keep_gini)
                    retirement_wealth[k].push_back(arm.wealth_at_retirement);
            }
        }
        if (a.reached_retirement) {
            ++r.retired;
            ++r.consumption_obs;
            ++r.post_mdd_obs;
        }
        r.liquidations += a.liquidations;
        r.defaults += a.defaults;
        r.rm_originations += a.rm_originations;
        if (counts_of_b) {
            r.match_violations += b.match_violations;
            r.working_years += std::min(b.years, kRetirementYear);
        }
    }

    void merge(CellAccumulator&& other)
    {
        auto& r = result;
        const auto& o = other.result;
        r.households += o.households;
        r.purchased += o.purchased;
        r.retired += o.retired;
        r.consumption_obs += o.consumption_obs;
        r.post_mdd_obs += o.post_mdd_obs;
        for (int k = 0; k < 2; ++k) {
            r.wealth_retirement[k] += o.wealth_retirement[k];
            r.financial_retirement[k] += o.financial_retirement[k];
            r.wealth_death[k] += o.wealth_death[k];
            r.financial_death[k] += o.financial_death[k];
            r.v_post[k] += o.v_post[k];
            r.v_pre[k] += o.v_pre[k];
            r.v_lifetime[k] += o.v_lifetime[k];
            r.v_consumption[k] += o.v_consumption[k];
            r.v_bequest[k] += o.v_bequest[k];
            r.mdd_lifetime[k] += o.mdd_lifetime[k];
            r.mdd_pre[k] += o.mdd_pre[k];
            r.mdd_post[k] += o.mdd_post[k];
            auto& mine = retirement_wealth[static_cast<std::size_t>(k)];
            auto& theirs = other.retirement_wealth[static_cast<std::size_t>(k)];
            mine.insert(mine.end(), theirs.begin(), theirs.end());
        }
        r.liquidations += o.liquidations;
        r.defaults += o.defaults;
        r.rm_originations += o.rm_originations;
        r.match_violations += o.match_violations;
        r.working_years += o.working_years;
    }
};

struct Partial
{
    std::vector<CellAccumulator> cells;
    std::vector<CellAccumulator> second;
    std::array<std::vector<BracketObservation>, 3> observations; // income, hpi, interest
    std::vector<AgeProfileRow> age_profile;

    void merge(Partial&& other)
    {
        for (std::size_t c = 0; c < cells.size(); ++c)
            cells[c].merge(std::move(other.cells[c]));
        for (std::size_t c = 0; c < second.size(); ++c)
            second[c].merge(std::move(other.second[c]));
        for (std::size_t k = 0; k < observations.size(); ++k)
            observations[k].insert(observations[k].end(), other.observations[k].begin(),
                                   other.observations[k].end());
        for (std::size_t t = 0; t < age_profile.size(); ++t) {
            auto& a = age_profile[t];
            const auto& b = other.age_profile[t];
            a.households += b.households;
            for (std::size_t k = 0; k < 2; ++k) {
                a.wealth[k] += b.wealth[k];
                a.financial[k] += b.financial[k];
                a.consumption[k] += b.consumption[k];
                a.housing[k] += b.housing[k];
            }
        }
    }
};

struct GridLayout
{
    std::vector<Strategy> cells;
    std::vector<Strategy> second;
    std::size_t base = 0;
};

GridLayout layout_of(const RunConfig& config)
{
    GridLayout g;
    for (double d : config.down_fracs)
        for (double th : config.threshold_fracs) {
            Strategy s;
            s.down_frac = d;
            s.threshold_frac = th;
            if (d == config.base_down && th == config.base_threshold)
                g.base = g.cells.size();
            g.cells.push_back(s);
        }
    if (config.second_home)
        for (double d2 : config.second_down_fracs)
            for (double th2 : config.second_threshold_fracs) {
                Strategy s = g.cells[g.base];
                s.allow_second_home = true;
                s.second_down_frac = d2;
                s.second_threshold_frac = th2;
                g.second.push_back(s);
            }
    return g;
}

Partial empty_partial(const GridLayout& g)
{
    Partial p;
    p.cells.resize(g.cells.size());
    for (std::size_t c = 0; c < g.cells.size(); ++c)
        p.cells[c].result.strategy = g.cells[c];
    p.second.resize(g.second.size());
    for (std::size_t c = 0; c < g.second.size(); ++c)
        p.second[c].result.strategy = g.second[c];
    p.age_profile.resize(kLifeHorizon);
    for (int t = 0; t < kLifeHorizon; ++t)
        p.age_profile[static_cast<std::size_t>(t)].age = kStartAge + t;
    return p;
}

void record_base(Partial& p, const ArmOutcome& owner, const ArmOutcome& renter, const UtilityParams& u)
{
    const auto wo = welfare_of(owner, u);
    const auto wr = welfare_of(renter, u);
    BracketObservation obs;
    obs.reached_retirement = owner.reached_retirement;
    obs.owner_wealth_retirement = owner.wealth_at_retirement;
    obs.renter_wealth_retirement = renter.wealth_at_retirement;
    obs.owner_wealth_death = owner.terminal_wealth;
    obs.renter_wealth_death = renter.terminal_wealth;
    obs.owner_v_post = wo.post;
    obs.renter_v_post = wr.post;
    obs.owner_v_lifetime = wo.lifetime;
    obs.renter_v_lifetime = wr.lifetime;
    const auto& info = *owner.purchase;
    const double keys[3] = {info.household_income, info.hpi, info.mortgage_rate};
    for (std::size_t k = 0; k < 3; ++k) {
        obs.key = keys[k];
        p.observations[k].push_back(obs);
    }
    for (int t = 0; t < owner.years; ++t) {
        const auto i = static_cast<std::size_t>(t);
        auto& row = p.age_profile[i];
        ++row.households;
        const ArmOutcome* arms[2] = {&owner, &renter};
        for (std::size_t k = 0; k < 2; ++k) {
            row.wealth[k] += arms[k]->wealth[i];
            row.financial[k] += arms[k]->financial[i];
            row.consumption[k] += arms[k]->consumption[i];
            row.housing[k] += arms[k]->wealth[i] - arms[k]->financial[i];
        }
    }
}

void simulate_household(const RunConfig& config, const ModelInputs& inputs, const SimulationParams& params,
                        const GridLayout& g, std::int64_t index, Partial& p)
{
    const auto draw = draw_household(inputs, config.seed, static_cast<std::uint64_t>(index));
    const auto env = make_environment(draw.path, draw.male, draw.female, draw.lifespans, params.replacement);

    std::optional<ArmOutcome> base_owner;
    for (std::size_t c = 0; c < g.cells.size(); ++c) {
        try {
            auto& acc = p.cells[c];
            ++acc.result.households;
            auto owner = simulate_owner(env, g.cells[c], params);
            if (!owner.purchase)
                continue;
            // A household that never buys is its own benchmark.
            const auto renter = simulate_benchmark(env, owner, params);
            acc.add(owner, renter, params.utility, true, true);
            if (c == g.base) {
                record_base(p, owner, renter, params.utility);
                base_owner = std::move(owner);
            }
        } catch (const std::exception& e) {
            throw RuntimeError(fmt::format("household {}, strategy {}/{}: {}", index, g.cells[c].down_frac,
                                           g.cells[c].threshold_frac, e.what()));
        }
    }
    for (std::size_t c = 0; c < g.second.size(); ++c) {
        auto& acc = p.second[c];
        ++acc.result.households;
        if (!base_owner)
            continue;
        try {
            const auto owner = simulate_owner(env, g.second[c], params);
            if (owner.second_purchase)
                acc.add(owner, *base_owner, params.utility, false, false);
        } catch (const std::exception& e) {
            throw RuntimeError(fmt::format("household {}, second-home strategy {}/{}: {}", index,
                                           g.second[c].second_down_frac, g.second[c].second_threshold_frac,
                                           e.what()));
        }
    }
}

void finish_gini(CellAccumulator& acc)
{
    for (std::size_t k = 0; k < 2; ++k) {
        auto& w = acc.retirement_wealth[k];
        const bool positive = std::any_of(w.begin(), w.end(), [](double x) { return x > 0.0; });
        acc.result.gini_retirement[k] = positive ? gini(std::move(w)) : 0.0;
        w = {};
    }
}

} // namespace

ResultSet run_grid(const RunConfig& config, const ModelInputs& inputs)
{
    config.validate();
    const GridLayout g = layout_of(config);
    const auto params = simulation_params(inputs, config);

    const std::int64_t chunks = (config.households + kChunkSize - 1) / kChunkSize;
    std::vector<Partial> partials(static_cast<std::size_t>(chunks));
    parallel_chunks(chunks, worker_count(config.threads, chunks), [&](std::int64_t chunk) {
        Partial p = empty_partial(g);
        const std::int64_t end = std::min(config.households, (chunk + 1) * kChunkSize);
        for (std::int64_t i = chunk * kChunkSize; i < end; ++i)
            simulate_household(config, inputs, params, g, i, p);
        partials[static_cast<std::size_t>(chunk)] = std::move(p);
    });

    // Fixed-order reduction by chunk index.
    Partial total = empty_partial(g);
    for (auto& p : partials) {
        total.merge(std::move(p));
        p = Partial{};
    }

    ResultSet out;
    out.base_cell = g.base;
    for (auto& acc : total.cells) {
        finish_gini(acc);
        out.cells.push_back(acc.result);
    }
    for (auto& acc : total.second)
        out.second_home.push_back(acc.result);

    static const std::vector<double> deciles{0, 10, 20, 30, 40, 50, 60, 70, 80, 90, 100};
    static const char* keys[3] = {"income", "hpi", "interest"};
    for (std::size_t k = 0; k < 3; ++k)
        out.heterogeneity.emplace_back(keys[k], bracket_report(total.observations[k], deciles));

    for (auto& row : total.age_profile) {
        if (row.households == 0)
            continue;
        const double n = static_cast<double>(row.households);
        for (std::size_t k = 0; k < 2; ++k) {
            row.wealth[k] /= n;
            row.financial[k] /= n;
            row.consumption[k] /= n;
            row.housing[k] /= n;
        }
        out.age_profile.push_back(row);
    }

    out.seed = config.seed;
    out.households = config.households;
    out.config_hash = config.hash();
    out.panel_fingerprint = inputs.panel_fingerprint;
    out.timestamp = utc_timestamp();
    return out;
}

double rebalanced_growth(const MarketState& m, double stock_weight, double other_return)
{
    const double nominal = stock_weight * m.stock_return + (1.0 - stock_weight) * other_return;
    return (1.0 + nominal) / (1.0 + m.inflation);
}

ComparisonResult run_strategy_comparison(const RunConfig& config, const ModelInputs& inputs)
{
    config.validate();
    struct Sums
    {
        std::array<std::array<double, 3>, kLifeHorizon> sum{}, sum_sq{};
    };
    const std::int64_t n = config.comparison_paths;
    const std::int64_t chunks = (n + kChunkSize - 1) / kChunkSize;
    std::vector<Sums> partials(static_cast<std::size_t>(chunks));
    parallel_chunks(chunks, worker_count(config.threads, chunks), [&](std::int64_t chunk) {
        Sums s;
        const std::int64_t end = std::min(n, (chunk + 1) * kChunkSize);
        for (std::int64_t i = chunk * kChunkSize; i < end; ++i) {
            auto rng = substream(config.seed, static_cast<std::uint64_t>(i), Stream::economy);
            const auto path = sample_path(inputs.panel, rng);
            std::array<double, 3> log_w{};
            for (std::size_t t = 0; t < path.size(); ++t) {
                const auto& m = path[t];
                log_w[0] += std::log(rebalanced_growth(m, 1.0, 0.0));
                log_w[1] += std::log(rebalanced_growth(m, 0.5, m.bond_return));
                log_w[2] += std::log(rebalanced_growth(m, 0.5, m.housing_return));
                for (std::size_t k = 0; k < 3; ++k) {
                    s.sum[t][k] += log_w[k];
                    s.sum_sq[t][k] += log_w[k] * log_w[k];
                }
            }
        }
        partials[static_cast<std::size_t>(chunk)] = s;
    });

    Sums total;
    for (const auto& p : partials)
        for (std::size_t t = 0; t < kLifeHorizon; ++t)
            for (std::size_t k = 0; k < 3; ++k) {
                total.sum[t][k] += p.sum[t][k];
                total.sum_sq[t][k] += p.sum_sq[t][k];
            }

    ComparisonResult out;
    const double count = static_cast<double>(n);
    for (std::size_t t = 0; t < kLifeHorizon; ++t) {
        ComparisonRow row;
        row.year = static_cast<int>(t) + 1;
        for (std::size_t k = 0; k < 3; ++k) {
            row.mean[k] = total.sum[t][k] / count;
            const double var = n > 1 ? (total.sum_sq[t][k] - count * row.mean[k] * row.mean[k]) / (count - 1.0)
                                     : 0.0;
            row.stddev[k] = std::sqrt(std::max(0.0, var));
        }
        out.rows.push_back(row);
    }
    out.seed = config.seed;
    out.paths = n;
    out.config_hash = config.hash();
    out.panel_fingerprint = inputs.panel_fingerprint;
    out.timestamp = utc_timestamp();
    return out;
}

namespace {

struct Meta
{
    std::uint64_t seed;
    std::int64_t samples;
    std::string config_hash, panel_fingerprint, timestamp;
};

class CsvFile
{
public:
    CsvFile(const std::filesystem::path& file, const std::string& table, const std::string& description,
            const Meta& meta)
        : path_(file), out_(file)
    {
        if (!out_)
            throw std::runtime_error("cannot write " + file.string());
        out_ << fmt::format("# table: {}\n# description: {}\n# seed: {}\n# samples: {}\n# config_hash: {}\n"
                            "# panel_fingerprint: {}\n# created: {}\n",
                            table, description, meta.seed, meta.samples, meta.config_hash,
                            meta.panel_fingerprint, meta.timestamp);
    }

    void row(const std::vector<std::string>& fields) { out_ << fmt::format("{}\n", fmt::join(fields, ",")); }

    std::filesystem::path close()
    {
        out_.close();
        if (!out_)
            throw std::runtime_error("failed writing " + path_.string());
        return path_;
    }

private:
    std::filesystem::path path_;
    std::ofstream out_;
};

std::string num(double x)
{
    return fmt::format("{:.6f}", x);
}

std::string pct(std::optional<double> x)
{
    return x ? fmt::format("{:.4f}", 100.0 * *x) : std::string{};
}

std::string frac(double x)
{
    return fmt::format("{:.2f}", x);
}

std::string count(std::int64_t n)
{
    return fmt::format("{}", n);
}

/// Renter MDD minus owner MDD; positive means the owner was protected.
std::optional<double> mdd_change(const CellResult& c, const std::array<double, 2>& sums, std::int64_t n)
{
    if (n <= 0)
        return std::nullopt;
    return c.mean(sums, 1, n) - c.mean(sums, 0, n);
}

std::optional<double> gini_change(const CellResult& c)
{
    if (c.retired <= 0 || !(c.gini_retirement[1] > 0.0))
        return std::nullopt;
    return c.gini_retirement[0] / c.gini_retirement[1] - 1.0;
}

void ensure_dir(const std::filesystem::path& dir)
{
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec || !std::filesystem::is_directory(dir))
        throw std::runtime_error(fmt::format("cannot create output directory {}", dir.string()));
}

} // namespace

std::vector<std::filesystem::path> write_tables(const ResultSet& r, const std::filesystem::path& out_dir)
{
    ensure_dir(out_dir);
    const Meta meta{r.seed, r.households, r.config_hash, r.panel_fingerprint, r.timestamp};
    std::vector<std::filesystem::path> written;
    const std::vector<std::string> strategy_cols{"down_frac", "threshold_frac"};
    auto with_strategy = [&](std::vector<std::string> cols) {
        cols.insert(cols.begin(), strategy_cols.begin(), strategy_cols.end());
        return cols;
    };
    auto key = [](const CellResult& c) {
        return std::vector<std::string>{frac(c.strategy.down_frac), frac(c.strategy.threshold_frac)};
    };
    auto append = [](std::vector<std::string> a, const std::vector<std::string>& b) {
        a.insert(a.end(), b.begin(), b.end());
        return a;
    };

    {
        CsvFile f(out_dir / "cells.csv", "cells", "per-strategy counts and raw means (owner, renter)", meta);
        f.row(with_strategy({"households", "purchased", "retired", "owner_wealth_retirement",
                             "renter_wealth_retirement", "owner_wealth_death", "renter_wealth_death",
                             "owner_v_post", "renter_v_post", "liquidations", "defaults", "rm_originations",
                             "match_violations", "working_years"}));
        for (const auto& c : r.cells)
            f.row(append(key(c), {count(c.households), count(c.purchased), count(c.retired),
                                  num(c.mean(c.wealth_retirement, 0, c.retired)),
                                  num(c.mean(c.wealth_retirement, 1, c.retired)),
                                  num(c.mean(c.wealth_death, 0, c.purchased)),
                                  num(c.mean(c.wealth_death, 1, c.purchased)),
                                  num(c.mean(c.v_post, 0, c.purchased)), num(c.mean(c.v_post, 1, c.purchased)),
                                  count(c.liquidations), count(c.defaults), count(c.rm_originations),
                                  count(c.match_violations), count(c.working_years)}));
        written.push_back(f.close());
    }
    {
        CsvFile f(out_dir / "gains.csv", "gains",
                  "owner vs renter change in mean wealth at death and mean post-retirement equivalent wealth, percent",
                  meta);
        f.row(with_strategy({"purchased", "wealth_change_death_pct", "welfare_change_post_pct",
                             "welfare_change_lifetime_pct"}));
        for (const auto& c : r.cells)
            f.row(append(key(c), {count(c.purchased), pct(c.change(c.wealth_death, c.purchased)),
                                  pct(c.change(c.v_post, c.purchased)), pct(c.change(c.v_lifetime, c.purchased))}));
        written.push_back(f.close());
    }
    {
        const auto& base = r.cells.at(r.base_cell);
        const double base_w = base.mean(base.wealth_death, 0, base.purchased);
        const double base_v = base.mean(base.v_post, 0, base.purchased);
        CsvFile f(out_dir / "best_choice.csv", "best_choice",
                  "owner mean wealth at death and post-retirement equivalent wealth, base strategy = 100", meta);
        f.row(with_strategy({"wealth_index", "welfare_index"}));
        auto index = [](double v, double b) { return b > 0.0 ? num(100.0 * v / b) : std::string{}; };
        for (const auto& c : r.cells)
            f.row(append(key(c), {index(c.mean(c.wealth_death, 0, c.purchased), base_w),
                                  index(c.mean(c.v_post, 0, c.purchased), base_v)}));
        written.push_back(f.close());
    }
    {
        CsvFile f(out_dir / "mdd.csv", "mdd",
                  "renter minus owner mean maximum drawdown, percentage points", meta);
        f.row(with_strategy({"mdd_change_lifetime_pp", "mdd_change_pre_pp", "mdd_change_post_pp"}));
        for (const auto& c : r.cells)
            f.row(append(key(c), {pct(mdd_change(c, c.mdd_lifetime, c.purchased)),
                                  pct(mdd_change(c, c.mdd_pre, c.purchased)),
                                  pct(mdd_change(c, c.mdd_post, c.post_mdd_obs))}));
        written.push_back(f.close());
    }
    {
        CsvFile f(out_dir / "gini.csv", "gini", "Gini of wealth at retirement, owner vs renter", meta);
        f.row(with_strategy({"retired", "gini_owner", "gini_renter", "gini_change_pct"}));
        for (const auto& c : r.cells)
            f.row(append(key(c), {count(c.retired), num(c.gini_retirement[0]), num(c.gini_retirement[1]),
                                  pct(gini_change(c))}));
        written.push_back(f.close());
    }
    {
        CsvFile f(out_dir / "costs.csv", "costs",
                  "owner vs renter change in wealth at retirement and financial assets at retirement and death, percent",
                  meta);
        f.row(with_strategy({"wealth_change_retirement_pct", "financial_change_retirement_pct",
                             "financial_change_death_pct"}));
        for (const auto& c : r.cells)
            f.row(append(key(c), {pct(c.change(c.wealth_retirement, c.retired)),
                                  pct(c.change(c.financial_retirement, c.retired)),
                                  pct(c.change(c.financial_death, c.purchased))}));
        written.push_back(f.close());
    }
    {
        CsvFile f(out_dir / "welfare_dissection.csv", "welfare_dissection",
                  "post-retirement welfare change from consumption alone and bequest alone, percent", meta);
        f.row(with_strategy({"consumption_obs", "welfare_change_consumption_pct", "welfare_change_bequest_pct"}));
        for (const auto& c : r.cells)
            f.row(append(key(c), {count(c.consumption_obs), pct(c.change(c.v_consumption, c.consumption_obs)),
                                  pct(c.change(c.v_bequest, c.purchased))}));
        written.push_back(f.close());
    }
    {
        CsvFile f(out_dir / "heterogeneity.csv", "heterogeneity",
                  "base strategy outcomes by percentile bracket of income, hpi and mortgage rate at purchase, percent",
                  meta);
        f.row({"key", "bracket", "households", "wealth_change_retirement_pct", "wealth_change_death_pct",
               "welfare_change_post_pct", "welfare_change_lifetime_pct"});
        for (const auto& [name, rows] : r.heterogeneity)
            for (const auto& b : rows)
                f.row({name, b.label, count(static_cast<std::int64_t>(b.count)), pct(b.wealth_change_retirement),
                       pct(b.wealth_change_death), pct(b.welfare_change_post), pct(b.welfare_change_lifetime)});
        written.push_back(f.close());
    }
    if (!r.second_home.empty()) {
        auto second_key = [](const CellResult& c) {
            return std::vector<std::string>{frac(c.strategy.second_down_frac),
                                            frac(c.strategy.second_threshold_frac)};
        };
        const std::vector<std::string> cols{"second_down_frac", "second_threshold_frac", "second_purchased"};
        {
            CsvFile f(out_dir / "second_home_wealth.csv", "second_home_wealth",
                      "second-home owner vs single-home base owner, percent", meta);
            f.row(append(cols, {"wealth_change_retirement_pct", "financial_change_retirement_pct",
                                "wealth_change_death_pct", "financial_change_death_pct"}));
            for (const auto& c : r.second_home)
                f.row(append(second_key(c), {count(c.purchased), pct(c.change(c.wealth_retirement, c.retired)),
                                             pct(c.change(c.financial_retirement, c.retired)),
                                             pct(c.change(c.wealth_death, c.purchased)),
                                             pct(c.change(c.financial_death, c.purchased))}));
            written.push_back(f.close());
        }
        {
            CsvFile f(out_dir / "second_home_welfare.csv", "second_home_welfare",
                      "second-home owner vs single-home base owner welfare, percent", meta);
            f.row(append(cols, {"welfare_change_lifetime_pct", "welfare_change_pre_pct", "welfare_change_post_pct",
                                "welfare_change_consumption_pct", "welfare_change_bequest_pct"}));
            for (const auto& c : r.second_home)
                f.row(append(second_key(c), {count(c.purchased), pct(c.change(c.v_lifetime, c.purchased)),
                                             pct(c.change(c.v_pre, c.purchased)),
                                             pct(c.change(c.v_post, c.purchased)),
                                             pct(c.change(c.v_consumption, c.consumption_obs)),
                                             pct(c.change(c.v_bequest, c.purchased))}));
            written.push_back(f.close());
        }
    }
    {
        CsvFile f(out_dir / "age_profile.csv", "age_profile",
                  "base strategy means over living households that bought, 2024 USD", meta);
        f.row({"age", "households", "owner_wealth", "renter_wealth", "owner_financial", "renter_financial",
               "owner_consumption", "renter_consumption", "owner_housing", "renter_housing"});
        for (const auto& a : r.age_profile)
            f.row({count(a.age), count(a.households), num(a.wealth[0]), num(a.wealth[1]), num(a.financial[0]),
                   num(a.financial[1]), num(a.consumption[0]), num(a.consumption[1]), num(a.housing[0]),
                   num(a.housing[1])});
        written.push_back(f.close());
    }
    return written;
}

std::filesystem::path write_comparison(const ComparisonResult& r, const std::filesystem::path& out_dir)
{
    ensure_dir(out_dir);
    CsvFile f(out_dir / "comparison.csv", "comparison",
              "mean and std of log real wealth from initial wealth 1, annual rebalancing", Meta{
                  r.seed, r.paths, r.config_hash, r.panel_fingerprint, r.timestamp});
    std::vector<std::string> header{"year"};
    for (const char* name : kComparisonPortfolios) {
        header.push_back(fmt::format("{}_mean", name));
        header.push_back(fmt::format("{}_std", name));
    }
    f.row(header);
    for (const auto& row : r.rows) {
        std::vector<std::string> fields{count(row.year)};
        for (std::size_t k = 0; k < 3; ++k) {
            fields.push_back(num(row.mean[k]));
            fields.push_back(num(row.stddev[k]));
        }
        f.row(fields);
    }
    return f.close();
}

std::filesystem::path write_trajectories(const RunConfig& config, const ModelInputs& inputs,
                                         const std::filesystem::path& out_dir)
{
    ensure_dir(out_dir);
    const auto file = out_dir / "trajectories.csv";
    std::ofstream out(file);
    if (!out)
        throw std::runtime_error("cannot write " + file.string());
    out << "household,arm,age,alive,labor,social_security,rent_income,ssi,rm_proceeds,sale_proceeds,consumption,"
           "housing_costs,purchase_outlay,asset_flow,financial_assets,housing_value,wealth,purchased,liquidated,"
           "defaulted,rm_originated,match_violation\n";
    auto params = simulation_params(inputs, config);
    params.record_years = true;
    Strategy base;
    base.down_frac = config.base_down;
    base.threshold_frac = config.base_threshold;
    for (std::int64_t i = 0; i < config.dump_trajectories; ++i) {
        const auto draw = draw_household(inputs, config.seed, static_cast<std::uint64_t>(i));
        const auto env = make_environment(draw.path, draw.male, draw.female, draw.lifespans, params.replacement);
        const auto pair = simulate_pair(env, base, params);
        const std::pair<const char*, const ArmOutcome*> arms[2] = {{"owner", &pair.owner}, {"renter", &pair.renter}};
        for (const auto& [name, arm] : arms)
            for (const auto& y : arm->records)
                out << fmt::format("{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{},{:d},{:d},{:d},{:d},{:d}\n", i,
                                   name, y.age, y.alive, y.labor, y.social_security, y.rent_income, y.ssi,
                                   y.rm_proceeds, y.sale_proceeds, y.consumption, y.housing_costs, y.purchase_outlay,
                                   y.asset_flow, y.financial_assets, y.housing_value, y.wealth, y.purchased,
                                   y.liquidated, y.defaulted, y.rm_originated, y.match_violation);
    }
    out.close();
    if (!out)
        throw std::runtime_error("failed writing " + file.string());
    return file;
}

} // namespace homesim

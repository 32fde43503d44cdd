#include "envcva/pipeline.hpp"

#include <openssl/evp.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "envcva/commodity.hpp"
#include "envcva/csv.hpp"
#include "envcva/cva_core.hpp"
#include "envcva/dependence_calibration.hpp"
#include "envcva/error.hpp"
#include "envcva/exposure.hpp"
#include "envcva/market_data.hpp"
#include "envcva/parallel.hpp"
#include "envcva/report.hpp"
#include "envcva/rng.hpp"
#include "envcva/robust_wwr.hpp"
#include "envcva/scenario_translation.hpp"
#include "envcva/stats.hpp"
#include "envcva/time_grid.hpp"
#include "json.hpp"

#ifndef ENVCVA_VERSION
#define ENVCVA_VERSION "0.0.0"
#endif

namespace envcva::pipeline {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

std::string to_string(Command c) {
    switch (c) {
    case Command::climate: return "climate";
    case Command::nature: return "nature";
    case Command::case_study: return "case-study";
    case Command::commodity: return "commodity";
    case Command::calibrate_eps: return "calibrate-eps";
    case Command::wwr_sweep: return "wwr-sweep";
    }
    return "unknown";
}

Command parse_command(const std::string& text) {
    for (auto c : {Command::climate, Command::nature, Command::case_study, Command::commodity, Command::calibrate_eps,
                   Command::wwr_sweep})
        if (to_string(c) == text) return c;
    throw ValidationError("unknown command `" + text + "`");
}

fs::path RunConfig::resolve(const fs::path& p) const { return p.is_absolute() ? p : base_dir / p; }

// ---------------------------------------------------------------- config

namespace {

// Reads one JSON object, tracking which keys were consumed so typos surface.
class Reader {
public:
    Reader(const json& j, std::string ctx) : j_(j), ctx_(std::move(ctx)) {
        if (!j_.is_object()) throw ValidationError(ctx_ + " must be a JSON object");
    }

    bool has(const std::string& key) const { return j_.contains(key) && !j_.at(key).is_null(); }

    template <class T>
    T get(const std::string& key, T fallback) {
        seen_.insert(key);
        if (!has(key)) return fallback;
        return convert<T>(key);
    }

    template <class T>
    std::optional<T> opt(const std::string& key) {
        seen_.insert(key);
        if (!has(key)) return std::nullopt;
        return convert<T>(key);
    }

    template <class T>
    T req(const std::string& key) {
        seen_.insert(key);
        if (!has(key)) throw ValidationError(ctx_ + "." + key + " is required");
        return convert<T>(key);
    }

    const json& sub(const std::string& key) {
        seen_.insert(key);
        return j_.at(key);
    }

    std::string where(const std::string& key) const { return ctx_ + "." + key; }

    void finish() const {
        for (auto it = j_.begin(); it != j_.end(); ++it)
            if (!seen_.count(it.key())) throw ValidationError("unknown key " + ctx_ + "." + it.key());
    }

private:
    template <class T>
    T convert(const std::string& key) {
        const json& v = j_.at(key);
        if constexpr (std::is_same_v<T, double>) {
            if (!v.is_number()) throw ValidationError(where(key) + " must be a number");
        } else if constexpr (std::is_same_v<T, bool>) {
            if (!v.is_boolean()) throw ValidationError(where(key) + " must be true or false");
        } else if constexpr (std::is_same_v<T, std::string>) {
            if (!v.is_string()) throw ValidationError(where(key) + " must be a string");
        } else if constexpr (std::is_integral_v<T>) {
            if (!v.is_number_integer()) throw ValidationError(where(key) + " must be an integer");
            if constexpr (std::is_unsigned_v<T>)
                if (!v.is_number_unsigned()) throw ValidationError(where(key) + " must be nonnegative");
        }
        try {
            return v.get<T>();
        } catch (const nlohmann::json::exception& e) {
            throw ValidationError(where(key) + ": " + e.what());
        }
    }

    const json& j_;
    std::string ctx_;
    std::set<std::string> seen_;
};

void require(bool ok, const std::string& msg) {
    if (!ok) throw ValidationError(msg);
}

bool is_multiple(double x, double step) {
    const double k = x / step;
    return std::abs(k - std::round(k)) < 1e-9 * std::max(1.0, k);
}

void require_increasing(const std::vector<double>& v, const std::string& name, bool allow_empty = false) {
    require(allow_empty || !v.empty(), name + " must not be empty");
    for (std::size_t i = 0; i < v.size(); ++i) {
        require(std::isfinite(v[i]) && v[i] >= 0.0, name + " must be nonnegative");
        if (i) require(v[i] > v[i - 1], name + " must be strictly increasing");
    }
}

ClipBounds read_clip(Reader& r, const std::string& key, ClipBounds fallback) {
    auto v = r.opt<std::vector<double>>(key);
    if (!v) return fallback;
    require(v->size() == 2, r.where(key) + " must be [lo, hi]");
    return {(*v)[0], (*v)[1]};
}

std::string read_reference(Reader& r) {
    if (r.has("reference") && r.sub("reference").is_array()) {
        const auto& arr = r.sub("reference");
        require(arr.size() == 1 && arr[0].is_string(), "exactly one reference scenario is required");
        return arr[0].get<std::string>();
    }
    return r.req<std::string>("reference");
}

void check_scenarios(const std::string& reference, const std::vector<std::string>& scenarios, const std::string& ctx) {
    require(!reference.empty(), ctx + ": exactly one reference scenario is required");
    std::set<std::string> seen;
    for (const auto& s : scenarios) {
        require(!s.empty(), ctx + ": empty scenario id");
        require(s != reference, ctx + ": scenario `" + s + "` is also the reference");
        require(seen.insert(s).second, ctx + ": scenario `" + s + "` listed twice");
    }
}

ClimateConfig parse_climate(const json& j) {
    Reader r(j, "climate");
    ClimateConfig c;
    c.reference = read_reference(r);
    c.scenarios = r.get("scenarios", std::vector<std::string>{});
    if (auto p = r.opt<std::string>("drivers")) c.drivers = *p;
    c.region = r.get("region", c.region);
    c.betas = r.get("betas", c.betas);
    c.report_horizons = r.get("report_horizons", c.report_horizons);
    if (r.has("multipliers")) {
        const auto& m = r.sub("multipliers");
        require(m.is_object(), "climate.multipliers must map scenario ids to {times, values}");
        for (auto it = m.begin(); it != m.end(); ++it) {
            Reader e(it.value(), "climate.multipliers." + it.key());
            ExplicitMultiplier em{e.req<std::vector<double>>("times"), e.req<std::vector<double>>("values")};
            e.finish();
            require(em.times.size() == em.values.size() && !em.times.empty(),
                    "climate.multipliers." + it.key() + ": times and values must be nonempty and aligned");
            require_increasing(em.times, "climate.multipliers." + it.key() + ".times");
            for (double v : em.values) require(v > 0.0 && std::isfinite(v), "multipliers must be positive");
            c.multipliers.emplace(it.key(), std::move(em));
        }
    } else {
        r.get("multipliers", json{});
    }
    r.finish();
    check_scenarios(c.reference, c.scenarios, "climate");
    require(c.drivers.has_value() != !c.multipliers.empty(),
            "climate needs exactly one of `drivers` (scenario file) or `multipliers`");
    if (!c.multipliers.empty()) {
        for (const auto& s : c.scenarios)
            require(c.multipliers.count(s) > 0, "climate.multipliers has no path for scenario `" + s + "`");
        if (auto it = c.multipliers.find(c.reference); it != c.multipliers.end())
            for (double v : it->second.values)
                require(v == 1.0, "the reference scenario multiplier is identically 1");
    } else {
        require(!c.betas.empty(), "climate.betas must name at least one driver");
    }
    require_increasing(c.report_horizons, "climate.report_horizons", true);
    return c;
}

NatureConfig parse_nature(const json& j) {
    Reader r(j, "nature");
    NatureConfig n;
    n.indicators = r.req<std::string>("indicators");
    n.variable = r.get("variable", n.variable);
    n.region = r.get("region", n.region);
    n.reference = read_reference(r);
    n.scenarios = r.get("scenarios", std::vector<std::string>{});
    n.beta = r.get("beta", n.beta);
    n.clip = read_clip(r, "clip", n.clip);
    n.bad_is_up = r.get("bad_is_up", n.bad_is_up);
    if (r.has("providers")) {
        const auto& arr = r.sub("providers");
        require(arr.is_array(), "nature.providers must be a list");
        for (std::size_t i = 0; i < arr.size(); ++i) {
            Reader p(arr[i], "nature.providers[" + std::to_string(i) + "]");
            n.providers.push_back({p.req<std::string>("label"), p.req<std::string>("path")});
            p.finish();
        }
    } else {
        r.get("providers", json{});
    }
    const bool modes_given = r.has("modes");
    n.modes = r.get("modes", n.modes);
    n.wwr_modes = r.get("wwr_modes", n.wwr_modes);
    n.epsilon = r.get("epsilon", n.epsilon);
    n.quantiles = r.get("quantiles", n.quantiles);
    n.histogram_bins = r.get("histogram_bins", n.histogram_bins);
    r.finish();
    check_scenarios(n.reference, n.scenarios, "nature");
    require(n.clip.lo > 0.0 && n.clip.lo < n.clip.hi, "nature.clip must satisfy 0 < lo < hi");
    require(std::isfinite(n.beta), "nature.beta must be finite");
    require(n.epsilon >= 0.0, "nature.epsilon must be nonnegative");
    for (const auto& m : n.modes) parse_tail_mode(m);
    if (n.providers.empty()) {
        // policy-only run unless hybrid modes were asked for explicitly
        require(!modes_given || n.modes.empty(), "nature.modes requests hybrid tail modes but no provider panels are configured");
        n.modes.clear();
    }
    for (const auto& m : n.wwr_modes) parse_tail_mode(m);
    std::set<std::string> labels;
    for (const auto& p : n.providers) require(labels.insert(p.label).second, "provider label `" + p.label + "` repeats");
    for (double q : n.quantiles) require(q > 0.0 && q <= 1.0, "nature.quantiles must lie in (0, 1]");
    require(n.histogram_bins >= 1, "nature.histogram_bins must be positive");
    return n;
}

CaseStudyConfig parse_case_study(const json& j) {
    Reader r(j, "case_study");
    CaseStudyConfig c;
    c.members = r.req<std::string>("members");
    c.lambda0 = r.get("lambda0", c.lambda0);
    c.omega = r.get("omega", c.omega);
    c.alpha_catch = r.get("alpha_catch", c.alpha_catch);
    c.alpha_price = r.get("alpha_price", c.alpha_price);
    c.cost_share = r.get("cost_share", c.cost_share);
    c.beta_pd = r.get("beta_pd", c.beta_pd);
    c.hazard_clip = read_clip(r, "hazard_clip", c.hazard_clip);
    c.k_r = r.get("k_r", c.k_r);
    c.r0 = r.get("r0", c.r0);
    c.recovery_clip = read_clip(r, "recovery_clip", c.recovery_clip);
    r.finish();
    require(c.lambda0 >= 0.0, "case_study.lambda0 must be nonnegative");
    return c;
}

CommodityConfig parse_commodity(const json& j) {
    Reader r(j, "commodity");
    CommodityConfig c;
    c.forwards = r.req<std::string>("forwards");
    c.models = r.get("models", c.models);
    c.sigma0 = r.get("sigma0", c.sigma0);
    c.kappa = r.get("kappa", c.kappa);
    c.sigma2_ratio = r.get("sigma2_ratio", c.sigma2_ratio);
    c.rho_f = r.get("rho_f", c.rho_f);
    c.shift = r.get("shift", c.shift);
    c.maturity = r.get("maturity", c.maturity);
    c.dt = r.get("dt", c.dt);
    c.volume = r.get("volume", c.volume);
    c.fixed_price = r.opt<double>("fixed_price");
    c.stress_scenario = r.get("stress_scenario", std::string{});
    r.finish();
    require(!c.models.empty(), "commodity.models must name 1F and/or 2F");
    for (const auto& m : c.models) require(m == "1F" || m == "2F", "commodity.models entries must be 1F or 2F");
    require(c.shift > 0.0, "commodity.shift must be positive");
    require(c.dt > 0.0 && c.maturity > 0.0 && is_multiple(c.maturity, c.dt),
            "commodity.maturity must be a positive multiple of commodity.dt");
    require(c.volume > 0.0, "commodity.volume must be positive");
    require(c.sigma0 >= 0.0 && c.kappa >= 0.0 && c.sigma2_ratio >= 0.0, "commodity volatilities must be nonnegative");
    require(c.rho_f > -1.0 && c.rho_f < 1.0, "commodity.rho_f must lie in (-1, 1)");
    return c;
}

CalibrationConfig parse_calibration(const json& j) {
    Reader r(j, "calibration");
    CalibrationConfig c;
    c.proxy = r.req<std::string>("proxy");
    c.spread = r.req<std::string>("spread");
    c.window = r.get("window", c.window);
    c.vol_window = r.get("vol_window", c.vol_window);
    c.vol_quantile = r.get("vol_quantile", c.vol_quantile);
    c.tail_quantile = r.get("tail_quantile", c.tail_quantile);
    c.side = r.get("side", c.side);
    c.eps_grid = r.get("eps_grid", c.eps_grid);
    c.rho_grid = r.get("rho_grid", c.rho_grid);
    c.copula_draws = r.get("copula_draws", c.copula_draws);
    c.scenario = r.get("scenario", std::string{});
    r.finish();
    require(c.window >= 2, "calibration.window must be at least 2");
    require(c.vol_window >= 2 && c.vol_window <= c.window, "calibration.vol_window must lie in [2, window]");
    require(c.vol_quantile >= 0.0 && c.vol_quantile <= 1.0, "calibration.vol_quantile must lie in [0, 1]");
    require(c.tail_quantile >= 0.0 && c.tail_quantile <= 1.0, "calibration.tail_quantile must lie in [0, 1]");
    parse_dependence_side(c.side);
    require_increasing(c.eps_grid, "calibration.eps_grid");
    require_increasing(c.rho_grid, "calibration.rho_grid");
    require(c.rho_grid.back() < 1.0, "calibration.rho_grid must stay below 1");
    require(c.copula_draws >= 1, "calibration.copula_draws must be positive");
    return c;
}

} // namespace

RunConfig parse_config(std::string_view json_text, const fs::path& base_dir) {
    json doc;
    try {
        doc = json::parse(json_text.begin(), json_text.end());
    } catch (const nlohmann::json::parse_error& e) {
        throw ValidationError(std::string("config is not valid JSON: ") + e.what());
    }
    RunConfig cfg;
    cfg.base_dir = base_dir;
    cfg.config_text = doc.dump();
    Reader r(doc, "config");
    const int schema = r.get("schema_version", kSchemaVersion);
    require(schema == kSchemaVersion, "unsupported config schema_version " + std::to_string(schema));
    cfg.as_of = r.get("as_of", std::string{});
    if (!cfg.as_of.empty()) {
        try {
            parse_iso_date(cfg.as_of);
        } catch (const Error&) {
            throw ValidationError("config.as_of must be an ISO date");
        }
    }
    cfg.base_year = r.get("base_year", cfg.base_year);
    if (!r.has("seed")) throw ValidationError("config.seed is required (no default entropy source)");
    cfg.seed = r.req<std::uint64_t>("seed");

    if (r.has("grid")) {
        Reader g(r.sub("grid"), "grid");
        cfg.grid.horizon = g.get("horizon", cfg.grid.horizon);
        cfg.grid.dt = g.get("dt", cfg.grid.dt);
        g.finish();
    } else {
        r.get("grid", json{});
    }
    require(cfg.grid.dt > 0.0, "grid.dt must be positive");
    require(cfg.grid.horizon > 0.0, "grid.horizon must be positive");
    require(is_multiple(cfg.grid.horizon, cfg.grid.dt), "grid.horizon must be a multiple of grid.dt");

    if (r.has("curve")) {
        Reader c(r.sub("curve"), "curve");
        if (auto y = c.opt<std::string>("yields")) cfg.curve.yields = *y;
        cfg.curve.flat_rate = c.get("flat_rate", cfg.curve.flat_rate);
        c.finish();
    } else {
        r.get("curve", json{});
    }

    if (r.has("credit")) {
        Reader c(r.sub("credit"), "credit");
        cfg.credit.spread = c.opt<double>("spread");
        cfg.credit.lambda0 = c.opt<double>("lambda0");
        cfg.credit.recovery = c.get("recovery", cfg.credit.recovery);
        cfg.credit.maturity = c.get("maturity", cfg.credit.maturity);
        cfg.credit.premium_frequency = c.get("premium_frequency", cfg.credit.premium_frequency);
        c.finish();
    } else {
        r.get("credit", json{});
    }
    require(cfg.credit.spread.has_value() != cfg.credit.lambda0.has_value(),
            "credit needs exactly one of `spread` (CDS calibration) or `lambda0`");
    if (cfg.credit.spread) require(*cfg.credit.spread > 0.0, "credit.spread must be positive");
    if (cfg.credit.lambda0) require(*cfg.credit.lambda0 >= 0.0, "credit.lambda0 must be nonnegative");
    require(cfg.credit.recovery >= 0.0 && cfg.credit.recovery < 1.0, "credit.recovery must lie in [0, 1)");
    require(cfg.credit.maturity > 0.0 && cfg.credit.premium_frequency > 0, "credit maturity and frequency must be positive");

    if (r.has("trade")) {
        Reader t(r.sub("trade"), "trade");
        cfg.trade.notional = t.get("notional", cfg.trade.notional);
        cfg.trade.maturity = t.get("maturity", cfg.trade.maturity);
        cfg.trade.frequency = t.get("frequency", cfg.trade.frequency);
        cfg.trade.fixed_rate = t.opt<double>("fixed_rate");
        cfg.trade.payer_fixed = t.get("payer_fixed", cfg.trade.payer_fixed);
        t.finish();
    } else {
        r.get("trade", json{});
    }
    require(cfg.trade.notional > 0.0, "trade.notional must be positive");
    require(cfg.trade.maturity > 0.0 && cfg.trade.frequency > 0, "trade maturity and frequency must be positive");

    if (r.has("hw1f")) {
        Reader h(r.sub("hw1f"), "hw1f");
        cfg.hw1f.a = h.get("a", cfg.hw1f.a);
        cfg.hw1f.sigma = h.get("sigma", cfg.hw1f.sigma);
        h.finish();
    } else {
        r.get("hw1f", json{});
    }
    Hw1fParams{cfg.hw1f.a, cfg.hw1f.sigma}.validate();

    if (r.has("mc")) {
        Reader m(r.sub("mc"), "mc");
        cfg.mc.exposure_paths = m.get("exposure_paths", cfg.mc.exposure_paths);
        cfg.mc.loss_draws = m.get("loss_draws", cfg.mc.loss_draws);
        m.finish();
    } else {
        r.get("mc", json{});
    }
    require(cfg.mc.exposure_paths >= 1 && cfg.mc.loss_draws >= 1, "mc sizes must be positive");

    if (r.has("wwr")) {
        Reader w(r.sub("wwr"), "wwr");
        cfg.wwr.epsilons = w.get("epsilons", cfg.wwr.epsilons);
        cfg.wwr.calibrated_epsilon = w.opt<double>("calibrated_epsilon");
        cfg.wwr.sweep = w.get("sweep", cfg.wwr.sweep);
        cfg.wwr.headline = w.opt<std::string>("headline");
        w.finish();
    } else {
        r.get("wwr", json{});
    }
    for (double e : cfg.wwr.epsilons) require(e >= 0.0 && std::isfinite(e), "wwr.epsilons must be nonnegative");
    if (cfg.wwr.calibrated_epsilon)
        require(*cfg.wwr.calibrated_epsilon >= 0.0, "wwr.calibrated_epsilon must be nonnegative");
    require_increasing(cfg.wwr.sweep, "wwr.sweep");

    if (r.has("climate")) cfg.climate = parse_climate(r.sub("climate"));
    else r.get("climate", json{});
    if (r.has("nature")) cfg.nature = parse_nature(r.sub("nature"));
    else r.get("nature", json{});
    if (r.has("case_study")) cfg.case_study = parse_case_study(r.sub("case_study"));
    else r.get("case_study", json{});
    if (r.has("commodity")) cfg.commodity = parse_commodity(r.sub("commodity"));
    else r.get("commodity", json{});
    if (r.has("calibration")) cfg.calibration = parse_calibration(r.sub("calibration"));
    else r.get("calibration", json{});
    r.finish();

    if (cfg.climate && cfg.wwr.headline) {
        const auto& c = *cfg.climate;
        require(*cfg.wwr.headline == c.reference ||
                    std::find(c.scenarios.begin(), c.scenarios.end(), *cfg.wwr.headline) != c.scenarios.end(),
                "wwr.headline names an unknown scenario");
    }
    return cfg;
}

RunConfig load_config(const fs::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw ValidationError("cannot read config " + path.string());
    std::ostringstream ss;
    ss << f.rdbuf();
    return parse_config(ss.str(), path.parent_path());
}

namespace {

json clip_json(ClipBounds c) { return json::array({c.lo, c.hi}); }

template <class T>
json opt_json(const std::optional<T>& v) {
    return v ? json(*v) : json(nullptr);
}

json path_json(const std::optional<fs::path>& p) { return p ? json(p->generic_string()) : json(nullptr); }

json resolved(const RunConfig& cfg) {
    json j;
    j["schema_version"] = kSchemaVersion;
    j["as_of"] = cfg.as_of;
    j["base_year"] = cfg.base_year;
    j["seed"] = cfg.seed;
    j["grid"] = {{"horizon", cfg.grid.horizon}, {"dt", cfg.grid.dt}};
    j["curve"] = {{"yields", path_json(cfg.curve.yields)}, {"flat_rate", cfg.curve.flat_rate}};
    j["credit"] = {{"spread", opt_json(cfg.credit.spread)},
                   {"lambda0", opt_json(cfg.credit.lambda0)},
                   {"recovery", cfg.credit.recovery},
                   {"maturity", cfg.credit.maturity},
                   {"premium_frequency", cfg.credit.premium_frequency}};
    j["trade"] = {{"notional", cfg.trade.notional},
                  {"maturity", cfg.trade.maturity},
                  {"frequency", cfg.trade.frequency},
                  {"fixed_rate", opt_json(cfg.trade.fixed_rate)},
                  {"payer_fixed", cfg.trade.payer_fixed}};
    j["hw1f"] = {{"a", cfg.hw1f.a}, {"sigma", cfg.hw1f.sigma}, {"forward_step", cfg.grid.dt / 10.0}};
    j["mc"] = {{"exposure_paths", cfg.mc.exposure_paths}, {"loss_draws", cfg.mc.loss_draws}};
    j["wwr"] = {{"epsilons", cfg.wwr.epsilons},
                {"calibrated_epsilon", opt_json(cfg.wwr.calibrated_epsilon)},
                {"sweep", cfg.wwr.sweep},
                {"headline", opt_json(cfg.wwr.headline)}};
    if (cfg.climate) {
        const auto& c = *cfg.climate;
        json m = json::object();
        for (const auto& [id, em] : c.multipliers) m[id] = {{"times", em.times}, {"values", em.values}};
        j["climate"] = {{"reference", c.reference},       {"scenarios", c.scenarios},
                        {"drivers", path_json(c.drivers)}, {"region", c.region},
                        {"betas", c.betas},               {"report_horizons", c.report_horizons},
                        {"multipliers", m}};
    }
    if (cfg.nature) {
        const auto& n = *cfg.nature;
        json providers = json::array();
        for (const auto& p : n.providers) providers.push_back({{"label", p.label}, {"path", p.path.generic_string()}});
        j["nature"] = {{"indicators", n.indicators.generic_string()},
                       {"variable", n.variable},
                       {"region", n.region},
                       {"reference", n.reference},
                       {"scenarios", n.scenarios},
                       {"beta", n.beta},
                       {"clip", clip_json(n.clip)},
                       {"bad_is_up", n.bad_is_up},
                       {"providers", providers},
                       {"modes", n.modes},
                       {"wwr_modes", n.wwr_modes},
                       {"epsilon", n.epsilon},
                       {"quantiles", n.quantiles},
                       {"histogram_bins", n.histogram_bins}};
    }
    if (cfg.case_study) {
        const auto& c = *cfg.case_study;
        j["case_study"] = {{"members", c.members.generic_string()},
                           {"lambda0", c.lambda0},
                           {"omega", c.omega},
                           {"alpha_catch", c.alpha_catch},
                           {"alpha_price", c.alpha_price},
                           {"price_proxy", 1.0},
                           {"cost_share", c.cost_share},
                           {"beta_pd", c.beta_pd},
                           {"hazard_clip", clip_json(c.hazard_clip)},
                           {"k_r", c.k_r},
                           {"r0", c.r0},
                           {"recovery_clip", clip_json(c.recovery_clip)}};
    }
    if (cfg.commodity) {
        const auto& c = *cfg.commodity;
        j["commodity"] = {{"forwards", c.forwards.generic_string()},
                          {"models", c.models},
                          {"sigma0", c.sigma0},
                          {"kappa", c.kappa},
                          {"sigma2_ratio", c.sigma2_ratio},
                          {"rho_f", c.rho_f},
                          {"shift", c.shift},
                          {"maturity", c.maturity},
                          {"dt", c.dt},
                          {"volume", c.volume},
                          {"fixed_price", opt_json(c.fixed_price)},
                          {"stress_scenario", c.stress_scenario}};
    }
    if (cfg.calibration) {
        const auto& c = *cfg.calibration;
        j["calibration"] = {{"proxy", c.proxy.generic_string()},
                            {"proxy_transform", "log_returns"},
                            {"spread", c.spread.generic_string()},
                            {"spread_transform", "differences"},
                            {"window", c.window},
                            {"vol_window", c.vol_window},
                            {"vol_quantile", c.vol_quantile},
                            {"tail_quantile", c.tail_quantile},
                            {"side", c.side},
                            {"eps_grid", c.eps_grid},
                            {"rho_grid", c.rho_grid},
                            {"copula_draws", c.copula_draws},
                            {"scenario", c.scenario}};
    }
    return j;
}

} // namespace

std::string resolved_config_json(const RunConfig& cfg) { return resolved(cfg).dump(2); }

std::string sha256_file(const fs::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw DataError("missing input file " + path.string());
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    if (!ctx || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1) {
        EVP_MD_CTX_free(ctx);
        throw NumericError("sha256 initialisation failed");
    }
    char buf[1 << 16];
    while (f) {
        f.read(buf, sizeof buf);
        if (f.gcount() > 0) EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(f.gcount()));
    }
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx, md, &len);
    EVP_MD_CTX_free(ctx);
    static const char* hex = "0123456789abcdef";
    std::string out;
    for (unsigned int i = 0; i < len; ++i) {
        out += hex[md[i] >> 4];
        out += hex[md[i] & 0xF];
    }
    return out;
}

// ---------------------------------------------------------------- run

namespace {

using Clock = std::chrono::steady_clock;

struct Context {
    const RunConfig& cfg;
    fs::path out_dir;
    std::uint64_t seed;
    bool export_exposures;
    json inputs = json::array();
    json results = json::object();
    json warnings = json::array();
    std::vector<std::string> files{};
    std::vector<std::pair<std::string, double>> timing{};
    Clock::time_point stage_start = Clock::now();

    // Resolves, hashes and records an input file.
    fs::path input(const std::string& role, const fs::path& configured) {
        const fs::path p = cfg.resolve(configured);
        if (!fs::exists(p)) throw DataError("missing input file for " + role + ": " + p.string());
        for (const auto& e : inputs)
            if (e["role"] == role && e["path"] == configured.generic_string()) return p;
        inputs.push_back({{"role", role},
                          {"path", configured.generic_string()},
                          {"bytes", static_cast<std::uint64_t>(fs::file_size(p))},
                          {"sha256", sha256_file(p)}});
        return p;
    }

    void stage(const std::string& name) {
        const auto now = Clock::now();
        timing.emplace_back(name, std::chrono::duration<double>(now - stage_start).count());
        stage_start = now;
    }

    void table(const std::string& stem, const report::CsvTable& t) {
        t.write(out_dir / (stem + ".csv"));
        files.push_back(stem + ".csv");
    }

    void figure(const std::string& stem, const std::string& svg) {
        report::write_text(out_dir / (stem + ".svg"), svg);
        files.push_back(stem + ".svg");
    }

    void warn(const std::string& msg) { warnings.push_back(msg); }
};

json cva_json(const CvaResult& r) {
    return {{"cva", r.cva}, {"cva_bp", r.cva_bp}, {"standard_error", r.standard_error}};
}

json bound_json(const RobustBound& b) {
    return {{"epsilon", b.epsilon},         {"bound", b.bound},           {"eta_star", b.eta_star},
            {"achieved_kl", b.achieved_kl}, {"sample_mean", b.sample_mean}};
}

json summary_json(const DistributionSummary& s) {
    return {{"n", s.n},       {"policy_only", s.policy_only}, {"median", s.median}, {"mean", s.mean},
            {"var95", s.var95}, {"es95", s.es95},             {"var99", s.var99},   {"es99", s.es99},
            {"prob_negative", s.prob_negative}};
}

// Shared interest-rate setup: curve, baseline intensity, swap and its exposure cube.
struct RateSetup {
    std::vector<double> grid;
    DiscountCurve curve = DiscountCurve::flat(0.0);
    double lambda0 = 0.0;
    double fixed_rate = 0.0;
    double notional = 1.0;
    double recovery = 0.4;
    ExposureCube cube;
    ExposureProfile profile;
};

DiscountCurve build_curve(Context& ctx) {
    const auto& c = ctx.cfg.curve;
    if (c.yields) return build_discount_curve(load_yield_quotes(ctx.input("yields", *c.yields)));
    return DiscountCurve::flat(c.flat_rate);
}

double baseline_intensity(const RunConfig& cfg, const DiscountCurve& curve) {
    if (cfg.credit.lambda0) return *cfg.credit.lambda0;
    const CdsQuote q{*cfg.credit.spread, cfg.credit.recovery, cfg.credit.maturity, cfg.credit.premium_frequency};
    return calibrate_flat_hazard(q, curve);
}

RateSetup rate_setup(Context& ctx) {
    const auto& cfg = ctx.cfg;
    RateSetup s;
    s.grid = make_uniform_grid(cfg.grid.horizon, cfg.grid.dt);
    s.curve = build_curve(ctx);
    s.lambda0 = baseline_intensity(cfg, s.curve);
    s.notional = cfg.trade.notional;
    s.recovery = cfg.credit.recovery;
    auto swap = SwapSpec::vanilla(cfg.trade.notional, cfg.trade.maturity, cfg.trade.frequency, 0.0,
                                  cfg.trade.payer_fixed);
    s.fixed_rate = cfg.trade.fixed_rate ? *cfg.trade.fixed_rate : par_rate(swap, s.curve);
    swap.fixed_rate = s.fixed_rate;
    const Hw1fModel model({cfg.hw1f.a, cfg.hw1f.sigma}, s.curve, cfg.grid.dt / 10.0);
    const auto paths = simulate_hw1f_paths(model, s.grid, cfg.mc.exposure_paths, derive_seed(ctx.seed, "exposure"));
    s.cube = compute_exposure_cube(paths, swap, model);
    s.profile = ExposureProfile::from_cube(s.cube);
    ctx.results["setup"] = {{"lambda0", s.lambda0},
                            {"lambda0_source", cfg.credit.lambda0 ? "config" : "cds_par_spread"},
                            {"fixed_rate", s.fixed_rate},
                            {"fixed_rate_source", cfg.trade.fixed_rate ? "config" : "par"},
                            {"grid_points", s.grid.size()},
                            {"exposure_seed", s.cube.seed},
                            {"epe_peak", *std::max_element(s.profile.epe.begin(), s.profile.epe.end())}};
    ctx.stage("exposure");
    return s;
}

void export_cube(Context& ctx, const ExposureCube& cube) {
    if (!ctx.export_exposures) return;
    std::ofstream f(ctx.out_dir / "exposures.csv", std::ios::binary | std::ios::trunc);
    if (!f) throw DataError("cannot write exposures.csv");
    f << "path,time,exposure\n";
    for (std::size_t p = 0; p < cube.n_paths; ++p)
        for (std::size_t i = 0; i < cube.n_points(); ++i)
            f << p << ',' << report::format_number(cube.grid[i]) << ',' << report::format_number(cube.at(p, i))
              << '\n';
    ctx.files.push_back("exposures.csv");
}

double linear_at(const std::vector<double>& x, const std::vector<double>& y, double t) {
    if (t <= x.front()) return y.front();
    if (t >= x.back()) return y.back();
    const auto k = static_cast<std::size_t>(std::upper_bound(x.begin(), x.end(), t) - x.begin());
    const double w = (t - x[k - 1]) / (x[k] - x[k - 1]);
    return y[k - 1] + w * (y[k] - y[k - 1]);
}

std::vector<std::string> all_scenarios(const ClimateConfig& c) {
    std::vector<std::string> out{c.reference};
    out.insert(out.end(), c.scenarios.begin(), c.scenarios.end());
    return out;
}

std::string headline_scenario(const RunConfig& cfg) {
    if (cfg.wwr.headline) return *cfg.wwr.headline;
    const auto& c = *cfg.climate;
    return c.scenarios.empty() ? c.reference : c.scenarios.back();
}

// Reference-relative climate multiplier on an arbitrary time grid.
ClimateTranslation climate_path(Context& ctx, const std::string& scenario, const std::vector<double>& grid) {
    const auto& c = *ctx.cfg.climate;
    if (scenario == c.reference) return {unit_multiplier(grid, scenario), false};
    if (!c.multipliers.empty()) {
        const auto& em = c.multipliers.at(scenario);
        std::vector<double> t = em.times, v = em.values;
        if (t.front() > 0.0) {
            t.insert(t.begin(), 0.0);
            v.insert(v.begin(), 1.0);
        }
        MultiplierPath m{grid, std::vector<double>(grid.size()), scenario, {0.0, kClimateSafetyCap}};
        for (std::size_t i = 0; i < grid.size(); ++i) m.values[i] = linear_at(t, v, grid[i]);
        return {m, false};
    }
    const fs::path file = ctx.input("climate.drivers", *c.drivers);
    std::vector<double> calendar(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) calendar[i] = ctx.cfg.base_year + grid[i];
    const std::vector<double> base{static_cast<double>(ctx.cfg.base_year)};
    auto drivers = [&](const std::string& id) {
        DriverSet set;
        for (const auto& [driver, beta] : c.betas) {
            const auto panel = load_scenario_drivers(file, id, driver, c.region);
            set[driver] = {interpolate_to_grid(panel, base).front(), interpolate_to_grid(panel, calendar)};
        }
        return set;
    };
    return climate_multiplier(drivers(scenario), drivers(c.reference), c.betas, grid, scenario);
}

SurvivalCurve scenario_survival(const std::vector<double>& grid, double lambda0, const MultiplierPath& m) {
    return survival_curve(apply_multiplier(flat_hazard(grid, lambda0, m.scenario_id), m));
}

std::vector<double> all_epsilons(const WwrConfig& w) {
    std::vector<double> e = w.epsilons;
    if (w.calibrated_epsilon) e.push_back(*w.calibrated_epsilon);
    return e;
}

struct ScenarioRun {
    std::string id;
    MultiplierPath multiplier;
    bool safety_cap_hit = false;
    SurvivalCurve survival;
    CvaResult cva;
    LossSampleSet losses;
};

std::vector<ScenarioRun> climate_runs(Context& ctx, const RateSetup& s) {
    std::vector<ScenarioRun> runs;
    const auto loss_seed = derive_seed(ctx.seed, "losses");
    for (const auto& id : all_scenarios(*ctx.cfg.climate)) {
        ScenarioRun r;
        r.id = id;
        auto tr = climate_path(ctx, id, s.grid);
        r.multiplier = std::move(tr.path);
        r.safety_cap_hit = tr.safety_cap_hit;
        if (r.safety_cap_hit) ctx.warn("climate multiplier safety cap hit for scenario " + id);
        r.survival = scenario_survival(s.grid, s.lambda0, r.multiplier);
        r.cva = independence_cva(s.profile, r.survival, constant_recovery(s.grid, s.recovery), s.notional, id);
        r.losses = sample_losses(s.cube, r.survival, s.recovery, ctx.cfg.mc.loss_draws, loss_seed, s.notional, id);
        runs.push_back(std::move(r));
    }
    ctx.stage("scenarios");
    return runs;
}

void write_multiplier_table(Context& ctx, const std::vector<ScenarioRun>& runs, const std::vector<double>& horizons) {
    report::CsvTable t({"scenario", "time", "multiplier"});
    std::vector<report::Series> lines;
    for (const auto& r : runs) {
        for (double h : horizons) t.add_row({r.id, h, linear_at(r.multiplier.grid, r.multiplier.values, h)});
        lines.push_back({r.id, r.multiplier.grid, r.multiplier.values});
    }
    ctx.table("multipliers", t);
    ctx.figure("multipliers", report::line_chart({"Hazard multiplier vs reference", "years", "m(t)"}, lines));
}

void cmd_climate(Context& ctx) {
    const auto& cfg = ctx.cfg;
    if (!cfg.climate) throw ValidationError("the climate command needs a `climate` block");
    const auto s = rate_setup(ctx);
    export_cube(ctx, s.cube);
    const auto runs = climate_runs(ctx, s);
    const ScenarioRun& ref = runs.front();
    write_multiplier_table(ctx, runs, cfg.climate->report_horizons);

    const auto eps = all_epsilons(cfg.wwr);
    std::vector<RobustBound> ref_bounds(eps.size());
    parallel_for(eps.size(), [&](std::size_t b, std::size_t e) {
        for (std::size_t k = b; k < e; ++k) ref_bounds[k] = solve_kl_bound(ref.losses, eps[k]);
    }, 1);
    const auto ref_sample = cva_from_samples(ref.losses);

    report::CsvTable ecva({"scenario", "epsilon", "provenance", "cva_ind_bp", "ecva_ind_bp", "standard_error_bp",
                           "addon_s_bp", "addon_ref_bp", "delta_wwr_bp", "ecva_upper_bp", "pinsker_tv"});
    json scen = json::array();
    std::vector<std::string> cats;
    std::vector<double> bar_ind, bar_wwr;
    const std::string headline = headline_scenario(cfg);
    for (const auto& r : runs) {
        const double ecva_bp = ecva_relative(r.cva, ref.cva);
        std::vector<RobustBound> bounds(eps.size());
        parallel_for(eps.size(), [&](std::size_t b, std::size_t e) {
            for (std::size_t k = b; k < e; ++k) bounds[k] = solve_kl_bound(r.losses, eps[k]);
        }, 1);
        const auto sample = cva_from_samples(r.losses);
        json wwr = json::array();
        for (std::size_t k = 0; k < eps.size(); ++k) {
            const auto d = delta_wwr(bounds[k], ref_bounds[k], sample, ref_sample);
            const bool calibrated = cfg.wwr.calibrated_epsilon && k + 1 == eps.size();
            const KlBudget budget{eps[k], calibrated ? KlBudget::Provenance::calibrated : KlBudget::Provenance::fixed};
            ecva.add_row({r.id, eps[k], calibrated ? "calibrated" : "fixed", r.cva.cva_bp, ecva_bp,
                          1e4 * r.cva.standard_error / s.notional, d.addon_s_bp, d.addon_ref_bp, d.delta_wwr_bp,
                          ecva_bp + d.delta_wwr_bp, budget.pinsker_tv_bound()});
            wwr.push_back({{"epsilon", eps[k]},
                           {"provenance", calibrated ? "calibrated" : "fixed"},
                           {"pinsker_tv_bound", budget.pinsker_tv_bound()},
                           {"upper_s", bound_json(bounds[k])},
                           {"upper_ref", bound_json(ref_bounds[k])},
                           {"addon_s_bp", d.addon_s_bp},
                           {"addon_ref_bp", d.addon_ref_bp},
                           {"delta_wwr_bp", d.delta_wwr_bp},
                           {"ecva_upper_bp", ecva_bp + d.delta_wwr_bp}});
        }
        json horizons = json::array();
        for (double h : cfg.climate->report_horizons)
            horizons.push_back({{"time", h}, {"multiplier", linear_at(r.multiplier.grid, r.multiplier.values, h)}});
        scen.push_back({{"scenario", r.id},
                        {"reference", r.id == ref.id},
                        {"multipliers", horizons},
                        {"safety_cap_hit", r.safety_cap_hit},
                        {"cva_ind", cva_json(r.cva)},
                        {"ecva_ind_bp", ecva_bp},
                        {"loss_sample", {{"draws", r.losses.n_draws()},
                                         {"seed", r.losses.seed},
                                         {"mean", r.losses.mean()},
                                         {"standard_error", r.losses.standard_error()}}},
                        {"wwr", wwr}});
        if (r.id != ref.id && !eps.empty()) {
            cats.push_back(r.id);
            bar_ind.push_back(ecva_bp);
            bar_wwr.push_back(delta_wwr(bounds[0], ref_bounds[0], sample, ref_sample).delta_wwr_bp);
        }
        if (r.id == headline && !eps.empty()) {
            const auto md = marginal_distortion(r.losses, bounds.back().weights, s.cube);
            report::CsvTable t({"time", "pmf_p", "pmf_q", "epe_p", "epe_q"});
            for (std::size_t i = 0; i < md.times.size(); ++i)
                t.add_row({md.times[i], md.pmf_p[i], md.pmf_q[i], md.epe_p[i], md.epe_q[i]});
            ctx.table("marginal_distortion", t);
            ctx.figure("marginal_distortion",
                       report::line_chart({"Default-time marginal under P and Q*", "years", "probability"},
                                          {{"P", md.times, md.pmf_p}, {"Q*", md.times, md.pmf_q}}));
            ctx.results["marginal_distortion"] = {{"scenario", r.id},
                                                  {"epsilon", eps.back()},
                                                  {"survivor_p", md.survivor_p},
                                                  {"survivor_q", md.survivor_q}};
        }
    }
    ctx.table("ecva", ecva);
    if (!eps.empty())
        ctx.figure("ecva", report::bar_chart({"Independence ECVA and robust WWR", "",
                                              "bp of notional (eps = " + report::format_number(eps[0]) + ")"},
                                             cats, {{"ECVA ind", {}, bar_ind}, {"Delta WWR", {}, bar_wwr}}));
    ctx.results["headline"] = headline;
    ctx.results["scenarios"] = scen;
    ctx.stage("wwr");
}

void cmd_wwr_sweep(Context& ctx) {
    const auto& cfg = ctx.cfg;
    if (!cfg.climate) throw ValidationError("the wwr-sweep command needs a `climate` block");
    const auto s = rate_setup(ctx);
    export_cube(ctx, s.cube);
    const auto runs = climate_runs(ctx, s);
    const auto& ref = runs.front();
    report::CsvTable t({"scenario", "epsilon", "cva_ind", "cva_upper", "wwr", "wwr_bp"});
    std::vector<report::Series> lines;
    json out = json::array();
    std::vector<EpsSweep> sweeps(runs.size());
    parallel_for(runs.size(), [&](std::size_t b, std::size_t e) {
        for (std::size_t k = b; k < e; ++k) sweeps[k] = eps_sweep(runs[k].losses, ref.losses, cfg.wwr.sweep);
    }, 1);
    for (std::size_t k = 0; k < runs.size(); ++k) {
        report::Series line{runs[k].id, {}, {}};
        json rows = json::array();
        for (const auto& row : sweeps[k].rows) {
            const double bp = 1e4 * row.wwr / s.notional;
            t.add_row({runs[k].id, row.epsilon, row.cva_ind, row.cva_upper, row.wwr, bp});
            line.x.push_back(row.epsilon);
            line.y.push_back(bp);
            rows.push_back({{"epsilon", row.epsilon}, {"cva_ind", row.cva_ind}, {"cva_upper", row.cva_upper},
                            {"wwr", row.wwr}});
        }
        if (!sweeps[k].wwr_nondecreasing) ctx.warn("WWR not monotone in epsilon for scenario " + runs[k].id);
        out.push_back({{"scenario", runs[k].id}, {"wwr_nondecreasing", sweeps[k].wwr_nondecreasing}, {"rows", rows}});
        lines.push_back(std::move(line));
    }
    ctx.table("eps_sweep", t);
    ctx.figure("eps_sweep", report::line_chart({"Robust WWR vs KL radius", "epsilon", "Delta WWR (bp)"}, lines));
    ctx.results["sweeps"] = out;
    ctx.stage("sweep");
}

// Annual calendar years covering the engine horizon.
std::vector<double> annual_calendar(const RunConfig& cfg) {
    const auto n = static_cast<std::size_t>(std::ceil(cfg.grid.horizon - 1e-9));
    std::vector<double> years(n);
    for (std::size_t k = 0; k < n; ++k) years[k] = cfg.base_year + static_cast<double>(k);
    return years;
}

void cmd_nature(Context& ctx) {
    const auto& cfg = ctx.cfg;
    if (!cfg.nature) throw ValidationError("the nature command needs a `nature` block");
    const auto& nc = *cfg.nature;
    const auto s = rate_setup(ctx);
    export_cube(ctx, s.cube);
    const auto years = annual_calendar(cfg);
    const auto recovery = constant_recovery(s.grid, s.recovery);

    const fs::path ind_file = ctx.input("nature.indicators", nc.indicators);
    auto indicator = [&](const std::string& id) {
        auto x = interpolate_to_grid(load_scenario_drivers(ind_file, id, nc.variable, nc.region), years);
        return nc.bad_is_up ? to_good_state(x) : x;
    };
    const auto x_ref = indicator(nc.reference);
    const auto stress_ref = policy_stress(x_ref);
    const auto flat = flat_hazard(s.grid, s.lambda0, nc.reference);
    const auto surv_ref = survival_curve(flat);
    const auto cva_ref = independence_cva(s.profile, surv_ref, recovery, s.notional, nc.reference);

    auto cva_of = [&](const MultiplierPath& annual) {
        const auto m = annual_to_grid(annual, s.grid);
        return independence_cva(s.profile, survival_curve(apply_multiplier(flat, m)), recovery, s.notional,
                                annual.scenario_id);
    };

    struct Family {
        std::string label;
        std::vector<ProviderPathPanel> panels;
    };
    std::vector<Family> families;
    for (const auto& p : nc.providers)
        families.push_back({p.label, load_provider_paths(ctx.input("nature.provider:" + p.label, p.path), cfg.base_year)});

    const auto loss_seed = derive_seed(ctx.seed, "losses");
    const auto ref_losses =
        sample_losses(s.cube, surv_ref, s.recovery, cfg.mc.loss_draws, loss_seed, s.notional, nc.reference);
    const auto ref_bound = solve_kl_bound(ref_losses, nc.epsilon);
    const auto ref_sample = cva_from_samples(ref_losses);

    report::CsvTable mult({"scenario", "time", "multiplier"});
    report::CsvTable summary({"scenario", "provider", "mode", "n", "policy_only", "median", "mean", "var95", "es95",
                              "var99", "es99", "prob_negative"});
    report::CsvTable values({"scenario", "provider", "mode", "path", "ncva_bp"});
    report::CsvTable wwr({"scenario", "provider", "mode", "quantile", "path", "ncva_ind_bp", "addon_s_bp",
                          "addon_ref_bp", "delta_wwr_bp", "ncva_upper_bp"});
    std::vector<report::Series> stress_lines, hist;
    std::vector<std::string> wwr_cats;
    std::vector<double> wwr_ind, wwr_delta;
    json scen = json::array();

    for (std::size_t k = 0; k < years.size(); ++k) mult.add_row({nc.reference, years[k] - cfg.base_year, 1.0});
    for (const auto& id : nc.scenarios) {
        const auto x_s = indicator(id);
        const auto stress_s = policy_stress(x_s);
        const auto policy = nature_policy_multiplier(x_s, x_ref, nc.beta, nc.clip, id);
        const auto policy_cva = cva_of(policy);
        const double policy_bp = ecva_relative(policy_cva, cva_ref);
        report::Series line{id, {}, policy.values};
        for (std::size_t k = 0; k < years.size(); ++k) {
            mult.add_row({id, years[k] - cfg.base_year, policy.values[k]});
            line.x.push_back(years[k]);
        }
        stress_lines.push_back(std::move(line));

        json rows = json::array();
        auto evaluate = [&](const std::string& provider, const std::string& mode,
                            const std::vector<std::string>& labels, const std::vector<MultiplierPath>& paths,
                            bool with_wwr) {
            std::vector<double> ncva(paths.size());
            std::vector<SurvivalCurve> survs(paths.size());
            for (std::size_t i = 0; i < paths.size(); ++i) {
                const auto m = annual_to_grid(paths[i], s.grid);
                survs[i] = survival_curve(apply_multiplier(flat, m));
                ncva[i] = ecva_relative(independence_cva(s.profile, survs[i], recovery, s.notional, id), cva_ref);
                values.add_row({id, provider, mode, labels[i], ncva[i]});
            }
            const auto ds = distribution_summary(ncva, policy_bp);
            summary.add_row({id, provider, mode, ds.n, ds.policy_only, ds.median, ds.mean, ds.var95, ds.es95,
                             ds.var99, ds.es99, ds.prob_negative});
            hist.push_back({id + " / " + provider + " / " + mode, {}, ncva});
            json row{{"provider", provider}, {"mode", mode}, {"summary", summary_json(ds)}};
            if (with_wwr) {
                json qrows = json::array();
                for (double q : nc.quantiles) {
                    const double target = stats::empirical_quantile(ncva, q);
                    std::size_t best = 0;
                    for (std::size_t i = 1; i < ncva.size(); ++i)
                        if (std::abs(ncva[i] - target) < std::abs(ncva[best] - target)) best = i;
                    const auto losses =
                        sample_losses(s.cube, survs[best], s.recovery, cfg.mc.loss_draws, loss_seed, s.notional, id);
                    const auto bound = solve_kl_bound(losses, nc.epsilon);
                    const auto d = delta_wwr(bound, ref_bound, cva_from_samples(losses), ref_sample);
                    wwr.add_row({id, provider, mode, q, labels[best], ncva[best], d.addon_s_bp, d.addon_ref_bp,
                                 d.delta_wwr_bp, ncva[best] + d.delta_wwr_bp});
                    wwr_cats.push_back(provider + " q" + report::format_number(q));
                    wwr_ind.push_back(ncva[best]);
                    wwr_delta.push_back(d.delta_wwr_bp);
                    qrows.push_back({{"quantile", q},
                                     {"target_ncva_bp", target},
                                     {"path", labels[best]},
                                     {"ncva_ind_bp", ncva[best]},
                                     {"addon_s_bp", d.addon_s_bp},
                                     {"addon_ref_bp", d.addon_ref_bp},
                                     {"delta_wwr_bp", d.delta_wwr_bp},
                                     {"ncva_upper_bp", ncva[best] + d.delta_wwr_bp}});
                }
                row["wwr_quantiles"] = qrows;
            }
            rows.push_back(row);
        };

        if (families.empty()) {
            evaluate("none", "policy-only", {"policy"}, {policy}, true);
        }
        for (const auto& fam : families) {
            for (const auto& mode_text : nc.modes) {
                const auto mode = parse_tail_mode(mode_text);
                const auto ens = tail_factors(fam.panels, mode);
                std::vector<std::size_t> col(years.size());
                for (std::size_t k = 0; k < years.size(); ++k) {
                    const auto it = std::find(ens.years.begin(), ens.years.end(), static_cast<int>(years[k]));
                    if (it == ens.years.end())
                        throw DataError("provider panel `" + fam.label + "` has no year " +
                                        std::to_string(static_cast<int>(years[k])));
                    col[k] = static_cast<std::size_t>(it - ens.years.begin());
                }
                std::vector<MultiplierPath> paths;
                for (std::size_t i = 0; i < ens.providers.size(); ++i) {
                    std::vector<double> f(years.size());
                    for (std::size_t k = 0; k < years.size(); ++k) f[k] = ens.factors[i][col[k]];
                    paths.push_back(hybrid_multiplier(stress_s, stress_ref, f, nc.beta, nc.clip, id));
                }
                const bool with_wwr =
                    std::find(nc.wwr_modes.begin(), nc.wwr_modes.end(), to_string(mode)) != nc.wwr_modes.end();
                evaluate(fam.label, to_string(mode), ens.providers, paths, with_wwr);
            }
        }
        scen.push_back({{"scenario", id},
                        {"policy_cva", cva_json(policy_cva)},
                        {"policy_only_ncva_bp", policy_bp},
                        {"ensembles", rows}});
    }
    ctx.table("multipliers", mult);
    ctx.figure("multipliers", report::line_chart({"Policy stress multiplier", "year", "m(t)"}, stress_lines));
    ctx.table("ncva_summary", summary);
    ctx.figure("ncva_summary", report::histogram({"NCVA across tail paths", "NCVA (bp)", "share of paths"}, hist,
                                                 nc.histogram_bins));
    ctx.table("ncva_values", values);
    ctx.table("wwr_quantiles", wwr);
    ctx.figure("wwr_quantiles", report::bar_chart({"NCVA and Delta WWR at quantile paths", "", "bp of notional"},
                                                  wwr_cats, {{"NCVA ind", {}, wwr_ind}, {"Delta WWR", {}, wwr_delta}}));
    ctx.results["reference"] = {{"scenario", nc.reference},
                                {"cva", cva_json(cva_ref)},
                                {"upper", bound_json(ref_bound)}};
    ctx.results["epsilon"] = nc.epsilon;
    ctx.results["scenarios"] = scen;
    ctx.stage("nature");
}

void cmd_case_study(Context& ctx) {
    const auto& cfg = ctx.cfg;
    if (!cfg.case_study) throw ValidationError("the case-study command needs a `case_study` block");
    const auto& cs = *cfg.case_study;
    const auto s = rate_setup(ctx);
    export_cube(ctx, s.cube);
    const auto years = annual_calendar(cfg);
    const std::size_t n = years.size();

    const fs::path file = ctx.input("case_study.members", cs.members);
    const auto table = csv::read(file, {"member", "year", "ratio"});
    std::vector<std::string> order;
    std::map<std::string, std::map<int, double>> ratios;
    for (const auto& row : table.rows) {
        const auto& m = row.fields[0];
        if (!ratios.count(m)) order.push_back(m);
        const auto year = static_cast<int>(csv::parse_long(row.fields[1], file, row.line));
        const double v = csv::parse_double(row.fields[2], file, row.line);
        if (!ratios[m].emplace(year, v).second)
            throw DataError(file.string() + ":" + std::to_string(row.line) + ": member `" + m + "` repeats year " +
                            std::to_string(year));
    }
    if (order.empty()) throw DataError("no members in " + file.string());

    TwoStageParams params;
    params.omega = cs.omega;
    params.alpha_catch = cs.alpha_catch;
    params.alpha_price = cs.alpha_price;
    params.cost_share = cs.cost_share;
    params.beta_pd = cs.beta_pd;
    params.hazard_clip = cs.hazard_clip;
    params.k_recovery = cs.k_r;
    params.base_recovery = cs.r0;
    params.recovery_clip = cs.recovery_clip;
    params.validate();

    std::vector<double> offsets(n);
    for (std::size_t k = 0; k < n; ++k) offsets[k] = static_cast<double>(k);
    const auto flat = flat_hazard(s.grid, cs.lambda0, "ref");
    const auto cva_ref =
        independence_cva(s.profile, survival_curve(flat), constant_recovery(s.grid, cs.r0), s.notional, "ref");

    report::CsvTable t({"member", "mean_ratio", "min_ratio", "max_ratio", "mean_multiplier", "final_multiplier",
                        "cva_bp", "ncva_bp", "wiped_out_points"});
    report::CsvTable mult({"scenario", "time", "multiplier", "recovery"});
    std::vector<report::Series> lines;
    json members = json::array();
    for (const auto& name : order) {
        const auto& byyear = ratios.at(name);
        std::vector<double> cr(n);
        for (std::size_t k = 0; k < n; ++k) {
            const auto it = byyear.find(static_cast<int>(years[k]));
            if (it == byyear.end())
                throw DataError("member `" + name + "` has no ratio for year " + std::to_string(static_cast<int>(years[k])));
            cr[k] = it->second;
        }
        const auto res = two_stage_transmission(cr, {}, params, offsets, name);
        if (res.wiped_out_points > 0)
            ctx.warn("member " + name + ": margin wiped out at " + std::to_string(res.wiped_out_points) +
                     " points, pinned at the clip bounds");
        const auto m = annual_to_grid(res.multiplier, s.grid);
        const auto rec = annual_to_grid(res.recovery, s.grid);
        const auto cva = independence_cva(s.profile, survival_curve(apply_multiplier(flat, m)), rec, s.notional, name);
        const double ncva = ecva_relative(cva, cva_ref);
        const auto [lo, hi] = std::minmax_element(cr.begin(), cr.end());
        const double mean_m = stats::mean(res.multiplier.values);
        t.add_row({name, stats::mean(cr), *lo, *hi, mean_m, res.multiplier.values.back(), cva.cva_bp, ncva,
                   res.wiped_out_points});
        for (std::size_t k = 0; k < n; ++k)
            mult.add_row({name, offsets[k], res.multiplier.values[k], res.recovery.recovery[k]});
        lines.push_back({name, years, cr});
        members.push_back({{"member", name},
                           {"mean_ratio", stats::mean(cr)},
                           {"min_ratio", *lo},
                           {"max_ratio", *hi},
                           {"mean_multiplier", mean_m},
                           {"final_multiplier", res.multiplier.values.back()},
                           {"cva", cva_json(cva)},
                           {"ncva_bp", ncva},
                           {"wiped_out_points", res.wiped_out_points}});
    }
    t.add_row({"ref", 1.0, 1.0, 1.0, 1.0, 1.0, cva_ref.cva_bp, 0.0, std::size_t{0}});
    ctx.table("case_study", t);
    ctx.figure("case_study", report::line_chart({"Physical ratio by member", "year", "ratio"}, lines));
    ctx.table("multipliers", mult);
    ctx.results["reference"] = {{"lambda0", cs.lambda0}, {"recovery", cs.r0}, {"cva", cva_json(cva_ref)}};
    ctx.results["members"] = members;
    ctx.stage("case_study");
}

void cmd_commodity(Context& ctx) {
    const auto& cfg = ctx.cfg;
    if (!cfg.commodity) throw ValidationError("the commodity command needs a `commodity` block");
    if (!cfg.climate) throw ValidationError("the commodity command needs a `climate` block for the stressed hazard");
    const auto& cc = *cfg.commodity;
    const std::string stress_id = cc.stress_scenario.empty() ? headline_scenario(cfg) : cc.stress_scenario;
    const auto known = all_scenarios(*cfg.climate);
    if (std::find(known.begin(), known.end(), stress_id) == known.end())
        throw ValidationError("commodity.stress_scenario `" + stress_id + "` is not a climate scenario");

    const auto grid = make_uniform_grid(cc.maturity, cc.dt);
    const auto curve = build_curve(ctx);
    const double lambda0 = baseline_intensity(cfg, curve);
    const auto m0 = load_forward_curve(ctx.input("commodity.forwards", cc.forwards));
    const auto m1 = shift_forward_curve(m0, cc.shift);
    auto swap = CommoditySwapSpec::monthly(cc.maturity, 0.0, cc.volume);
    swap.fixed_price = cc.fixed_price ? *cc.fixed_price : average_forward(m0, swap.payment_times);
    const double notional = swap.fixed_price * cc.volume * static_cast<double>(swap.payment_times.size());

    const auto tr = climate_path(ctx, stress_id, grid);
    const auto base = flat_hazard(grid, lambda0, cfg.climate->reference);
    const auto surv0 = survival_curve(base);
    const auto surv1 = survival_curve(apply_multiplier(base, tr.path));
    const double R = cfg.credit.recovery;
    const auto seed = derive_seed(ctx.seed, "commodity");
    ctx.stage("setup");

    report::CsvTable corners({"model", "cva_00", "cva_10", "cva_01", "cva_11", "credit", "market", "interaction",
                              "total", "interaction_share"});
    report::CsvTable epe({"model", "market_state", "time", "epe"});
    std::vector<report::Series> epe_lines;
    std::vector<std::string> cats;
    std::vector<double> b_credit, b_market, b_inter;
    json models = json::array();
    std::optional<ExposureCube> sweep_cube;
    for (const auto& label : cc.models) {
        CommodityParams p;
        if (label == "2F") {
            p = CommodityParams::two_factor_default(cc.sigma0, cc.kappa);
            p.sigma_long = cc.sigma2_ratio * cc.sigma0;
            p.correlation = cc.rho_f;
        } else {
            p.model = FuturesModel::one_factor;
            p.sigma_short = cc.sigma0;
            p.kappa = cc.kappa;
        }
        const auto cube0 = commodity_swap_exposure(simulate_wti_futures(p, m0, grid, cfg.mc.exposure_paths, seed), swap, curve);
        const auto cube1 = commodity_swap_exposure(simulate_wti_futures(p, m1, grid, cfg.mc.exposure_paths, seed), swap, curve);
        const double c00 = independence_cva(cube0, surv0, R, notional, "00").cva;
        const double c10 = independence_cva(cube0, surv1, R, notional, "10").cva;
        const double c01 = independence_cva(cube1, surv0, R, notional, "01").cva;
        const double c11 = independence_cva(cube1, surv1, R, notional, "11").cva;
        const auto d = corner_decomposition(c00, c10, c01, c11);
        corners.add_row({label, d.cva_00, d.cva_10, d.cva_01, d.cva_11, d.credit, d.market, d.interaction, d.total,
                         d.interaction_share});
        cats.push_back(label);
        b_credit.push_back(d.credit);
        b_market.push_back(d.market);
        b_inter.push_back(d.interaction);
        const auto e0 = epe_profile(cube0), e1 = epe_profile(cube1);
        for (std::size_t i = 0; i < grid.size(); ++i) epe.add_row({label, "M0", grid[i], e0[i]});
        for (std::size_t i = 0; i < grid.size(); ++i) epe.add_row({label, "M1", grid[i], e1[i]});
        epe_lines.push_back({label + " M0", grid, e0});
        epe_lines.push_back({label + " M1", grid, e1});
        models.push_back({{"model", label},
                          {"corners", {{"cva_00", d.cva_00}, {"cva_10", d.cva_10}, {"cva_01", d.cva_01}, {"cva_11", d.cva_11}}},
                          {"credit", d.credit},
                          {"market", d.market},
                          {"interaction", d.interaction},
                          {"total", d.total},
                          {"interaction_share", d.interaction_share}});
        if (!sweep_cube) {
            sweep_cube = cube0;
            export_cube(ctx, cube0);
        }
        ctx.stage("corners_" + label);
    }
    ctx.table("corners", corners);
    ctx.figure("corners", report::bar_chart({"Credit / market / interaction", "", "CVA change"}, cats,
                                            {{"credit", {}, b_credit}, {"market", {}, b_market},
                                             {"interaction", {}, b_inter}}));
    ctx.table("wti_epe", epe);
    ctx.figure("wti_epe", report::line_chart({"WTI swap EPE", "years", "EPE"}, epe_lines));

    const auto loss_seed = derive_seed(ctx.seed, "losses");
    const auto ls = sample_losses(*sweep_cube, surv1, R, cfg.mc.loss_draws, loss_seed, notional, stress_id);
    const auto lr = sample_losses(*sweep_cube, surv0, R, cfg.mc.loss_draws, loss_seed, notional, cfg.climate->reference);
    const auto sweep = eps_sweep(ls, lr, cfg.wwr.sweep);
    report::CsvTable st({"scenario", "epsilon", "cva_ind", "cva_upper", "wwr", "wwr_bp"});
    report::Series line{stress_id + " (" + cc.models.front() + ")", {}, {}};
    json rows = json::array();
    for (const auto& row : sweep.rows) {
        st.add_row({stress_id, row.epsilon, row.cva_ind, row.cva_upper, row.wwr, 1e4 * row.wwr / notional});
        line.x.push_back(row.epsilon);
        line.y.push_back(row.wwr);
        rows.push_back({{"epsilon", row.epsilon}, {"cva_ind", row.cva_ind}, {"cva_upper", row.cva_upper}, {"wwr", row.wwr}});
    }
    if (!sweep.wwr_nondecreasing) ctx.warn("commodity WWR not monotone in epsilon");
    ctx.table("eps_sweep", st);
    ctx.figure("eps_sweep", report::line_chart({"Robust WWR vs KL radius (WTI swap)", "epsilon", "WWR"}, {line}));

    ctx.results["setup"] = {{"lambda0", lambda0},
                            {"stress_scenario", stress_id},
                            {"fixed_price", swap.fixed_price},
                            {"notional", notional},
                            {"shift", cc.shift},
                            {"grid_points", grid.size()},
                            {"seed", seed}};
    ctx.results["models"] = models;
    ctx.results["eps_sweep"] = {{"model", cc.models.front()}, {"wwr_nondecreasing", sweep.wwr_nondecreasing}, {"rows", rows}};
    ctx.stage("sweep");
}

void cmd_calibrate(Context& ctx) {
    const auto& cfg = ctx.cfg;
    if (!cfg.calibration) throw ValidationError("the calibrate-eps command needs a `calibration` block");
    if (!cfg.climate) throw ValidationError("the calibrate-eps command needs a `climate` block");
    const auto& cc = *cfg.calibration;
    const auto side = parse_dependence_side(cc.side);

    const auto proxy = load_daily_series(ctx.input("calibration.proxy", cc.proxy), "proxy");
    const auto spread = load_daily_series(ctx.input("calibration.spread", cc.spread), "spread");
    const auto pair = inner_join(log_returns(proxy), differences(spread));
    const auto rolling = rolling_directional_rho(pair, cc.window, cc.vol_window);

    DependenceTarget target;
    std::string note;
    if (rolling.rho.empty()) {
        // Every window has a constant series: no measurable co-movement.
        target.rho_target = 0.0;
        target.regime = "no co-movement (all windows constant)";
        target.window = cc.window;
        target.vol_window = cc.vol_window;
        target.vol_quantile = cc.vol_quantile;
        target.tail_quantile = cc.tail_quantile;
        target.side = side;
        note = "zero-dependence outcome";
    } else {
        target = stressed_target(rolling, cc.vol_quantile, cc.tail_quantile, side);
    }
    report::CsvTable rr({"end_date", "rho", "rho_long", "rho_short", "realized_vol"});
    for (std::size_t k = 0; k < rolling.rho.size(); ++k)
        rr.add_row({format_iso_date(rolling.end_dates[k]), rolling.rho[k], rolling.rho_long[k], rolling.rho_short[k],
                    rolling.realized_vol[k]});
    ctx.table("rolling_rho", rr);
    ctx.results["target"] = {{"rho_target", target.rho_target},
                             {"regime", target.regime},
                             {"window", target.window},
                             {"vol_window", target.vol_window},
                             {"vol_quantile", target.vol_quantile},
                             {"tail_quantile", target.tail_quantile},
                             {"side", to_string(target.side)},
                             {"aligned_days", pair.x.size()},
                             {"windows_valid", rolling.rho.size()},
                             {"windows_skipped", rolling.skipped_windows},
                             {"windows_stressed", target.windows_stressed},
                             {"vol_threshold", target.vol_threshold},
                             {"note", note}};
    ctx.stage("target");

    const auto s = rate_setup(ctx);
    export_cube(ctx, s.cube);
    const std::string sid = cc.scenario.empty() ? headline_scenario(cfg) : cc.scenario;
    const auto known = all_scenarios(*cfg.climate);
    if (std::find(known.begin(), known.end(), sid) == known.end())
        throw ValidationError("calibration.scenario `" + sid + "` is not a climate scenario");
    const auto& ref_id = cfg.climate->reference;
    const auto m = climate_path(ctx, sid, s.grid).path;
    const auto surv_s = scenario_survival(s.grid, s.lambda0, m);
    const auto surv_ref = scenario_survival(s.grid, s.lambda0, unit_multiplier(s.grid, ref_id));
    const auto loss_seed = derive_seed(ctx.seed, "losses");
    const auto ls = sample_losses(s.cube, surv_s, s.recovery, cfg.mc.loss_draws, loss_seed, s.notional, sid);
    const auto lr = sample_losses(s.cube, surv_ref, s.recovery, cfg.mc.loss_draws, loss_seed, s.notional, ref_id);

    EquivalenceInputs in;
    in.cube_s = &s.cube;
    in.cube_ref = &s.cube;
    in.survival_s = surv_s;
    in.survival_ref = surv_ref;
    in.recovery_s = constant_recovery(s.grid, s.recovery);
    in.recovery_ref = in.recovery_s;
    in.losses_s = &ls;
    in.losses_ref = &lr;
    in.notional = s.notional;
    in.copula_draws = cc.copula_draws;
    in.seed = derive_seed(ctx.seed, "copula");
    const auto curve = build_equivalence_curve(in, cc.eps_grid, cc.rho_grid);
    ctx.stage("equivalence");

    report::CsvTable ct({"epsilon", "addon_eps", "rho_equiv", "saturated"});
    for (std::size_t k = 0; k < curve.eps_grid.size(); ++k)
        ct.add_row({curve.eps_grid[k], curve.addon_eps[k], curve.rho_equiv[k], static_cast<bool>(curve.saturated[k])});
    report::CsvTable cr({"rho", "addon_rho", "addon_rho_fit"});
    for (std::size_t k = 0; k < curve.rho_grid.size(); ++k)
        cr.add_row({curve.rho_grid[k], curve.addon_rho[k], curve.addon_rho_fit[k]});
    ctx.table("calibration", ct);
    ctx.figure("calibration", report::line_chart({"Equivalent copula correlation", "epsilon", "rho_equiv"},
                                                 {{"rho_equiv", curve.eps_grid, curve.rho_equiv}}));
    ctx.table("calibration_rho", cr);
    ctx.figure("calibration_rho", report::line_chart({"Copula add-on vs correlation", "rho", "add-on (bp)"},
                                                     {{"raw", curve.rho_grid, curve.addon_rho},
                                                      {"isotonic", curve.rho_grid, curve.addon_rho_fit}}));
    const double max_rho = *std::max_element(curve.rho_equiv.begin(), curve.rho_equiv.end());
    ctx.results["scenario"] = sid;
    ctx.results["max_attainable_rho"] = max_rho;
    ctx.results["copula_seed"] = in.seed;
    try {
        const double eps_star = select_eps_star(curve, target.rho_target);
        ctx.results["eps_star"] = eps_star;
        ctx.results["pinsker_tv_bound"] = KlBudget{eps_star, KlBudget::Provenance::calibrated}.pinsker_tv_bound();
    } catch (const NumericError& e) {
        ctx.results["eps_star"] = nullptr;
        ctx.results["calibration_error"] = {{"kind", "numeric"},
                                            {"message", e.what()},
                                            {"rho_target", target.rho_target},
                                            {"max_attainable_rho", max_rho}};
        throw;
    }
}

std::string render_run_json(Context& ctx, const std::string& command, const Error* error) {
    json doc;
    doc["schema_version"] = kSchemaVersion;
    doc["tool"] = {{"name", "envcva"}, {"version", ENVCVA_VERSION}};
    doc["command"] = command;
    doc["status"] = error ? "error" : "ok";
    doc["seed"] = ctx.seed;
    doc["seed_source"] = ctx.seed == ctx.cfg.seed ? "config" : "override";
    doc["config"] = json::parse(ctx.cfg.config_text);
    doc["resolved_config"] = resolved(ctx.cfg);
    doc["inputs"] = ctx.inputs;
    doc["results"] = ctx.results;
    doc["warnings"] = ctx.warnings;
    std::vector<std::string> files = ctx.files;
    files.push_back("run.json");
    files.push_back("timing.json");
    std::sort(files.begin(), files.end());
    doc["outputs"] = files;
    if (error) doc["error"] = {{"kind", error->kind_name()}, {"exit_code", error->exit_code()}, {"message", error->what()}};
    return doc.dump(2) + "\n";
}

} // namespace

RunOutcome run(Command command, const RunConfig& cfg, const RunOptions& options) {
    std::error_code ec;
    fs::create_directories(options.out_dir, ec);
    if (!fs::is_directory(options.out_dir)) throw DataError("cannot create output directory " + options.out_dir.string());
    Context ctx{cfg, options.out_dir, options.seed.value_or(cfg.seed), options.export_exposures};
    const auto t0 = Clock::now();
    const std::string name = to_string(command);

    auto finish = [&](const Error* error) {
        RunOutcome out;
        out.command = name;
        out.run_json = render_run_json(ctx, name, error);
        report::write_text(options.out_dir / "run.json", out.run_json);
        json timing;
        timing["command"] = name;
        timing["threads"] = worker_count();
        timing["wall_seconds"] = std::chrono::duration<double>(Clock::now() - t0).count();
        json stages = json::object();
        for (const auto& [k, v] : ctx.timing) stages[k] = v;
        timing["stages"] = stages;
        report::write_text(options.out_dir / "timing.json", timing.dump(2) + "\n");
        out.files = ctx.files;
        out.files.push_back("run.json");
        out.files.push_back("timing.json");
        std::sort(out.files.begin(), out.files.end());
        return out;
    };

    try {
        switch (command) {
        case Command::climate: cmd_climate(ctx); break;
        case Command::nature: cmd_nature(ctx); break;
        case Command::case_study: cmd_case_study(ctx); break;
        case Command::commodity: cmd_commodity(ctx); break;
        case Command::calibrate_eps: cmd_calibrate(ctx); break;
        case Command::wwr_sweep: cmd_wwr_sweep(ctx); break;
        }
    } catch (const Error& e) {
        finish(&e);
        throw;
    }
    return finish(nullptr);
}

} // namespace envcva::pipeline

#include "acd/harness.hpp"

#include "acd/error.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <thread>

namespace acd {

namespace {

std::string trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r\n");
    return std::string(s.substr(first, last - first + 1));
}

std::vector<std::string> split_list(const std::string& value)
{
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= value.size()) {
        const auto comma = value.find(',', start);
        const auto end = comma == std::string::npos ? value.size() : comma;
        auto item = trim(std::string_view(value).substr(start, end - start));
        if (!item.empty()) {
            out.push_back(std::move(item));
        }
        if (comma == std::string::npos) {
            break;
        }
        start = comma + 1;
    }
    return out;
}

double to_double(const std::string& key, const std::string& value)
{
    double out = 0.0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc() || ptr != value.data() + value.size() || !std::isfinite(out)) {
        throw ConfigError(key + ": expected a number, got '" + value + "'");
    }
    return out;
}

template <class Int>
Int to_int(const std::string& key, const std::string& value)
{
    Int out = 0;
    const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
    if (ec != std::errc() || ptr != value.data() + value.size()) {
        throw ConfigError(key + ": expected a non-negative integer, got '" + value + "'");
    }
    return out;
}

bool to_bool(const std::string& key, const std::string& value)
{
    if (value == "true" || value == "1" || value == "yes") {
        return true;
    }
    if (value == "false" || value == "0" || value == "no") {
        return false;
    }
    throw ConfigError(key + ": expected true or false, got '" + value + "'");
}

// Shortest round-trip form, used in file names.
std::string short_number(double v)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

// 17 significant digits, locale independent.
std::string full_number(double v)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

std::string optional_number(const std::optional<double>& v)
{
    return v ? full_number(*v) : std::string("NA");
}

// Examples as rows; the toy shape is used only when no data file is given.
Matrix load_data(const ProblemSpec& spec, Vector& labels, Rng& rng, Eigen::Index examples, Eigen::Index features)
{
    Matrix a;
    if (!spec.data.empty()) {
        const Dataset ds = parse_libsvm_file(spec.data, spec.dims);
        a = to_dense(ds);
        labels = labels_vector(ds);
    } else {
        ToyData toy = toy_classification_data(examples, features, rng);
        a = std::move(toy.a);
        labels = std::move(toy.labels);
    }
    if (spec.rescale) {
        a = rescale_corrupt(a, rng);
    }
    return a;
}

double estimate_factor(const ProblemSpec& spec, Eigen::Index n)
{
    if (spec.smoothness == "diag-sqrt-n") {
        return std::sqrt(static_cast<double>(n));
    }
    const std::string prefix = "diag:";
    if (spec.smoothness.rfind(prefix, 0) == 0) {
        const double f = to_double("smoothness", spec.smoothness.substr(prefix.size()));
        if (!(f > 0.0)) {
            throw ConfigError("smoothness: the diagonal factor must be positive");
        }
        return f;
    }
    throw ConfigError("smoothness: expected exact, diag:<factor> or diag-sqrt-n, got '" + spec.smoothness + "'");
}

} // namespace

bool set_problem_key(ProblemSpec& spec, const std::string& key, const std::string& value)
{
    if (key == "problem" || key == "type") {
        spec.type = value;
    } else if (key == "n") {
        spec.n = to_int<Eigen::Index>(key, value);
    } else if (key == "problem-seed") {
        spec.seed = to_int<std::uint64_t>(key, value);
    } else if (key == "matrix") {
        spec.matrix = value;
    } else if (key == "data") {
        spec.data = value;
    } else if (key == "dims") {
        spec.dims = parse_dims(value);
    } else if (key == "m") {
        spec.m = to_int<Eigen::Index>(key, value);
    } else if (key == "lambda-mode") {
        spec.lambda_mode = value;
    } else if (key == "lambda") {
        spec.lambda = to_double(key, value);
        spec.lambda_mode = "explicit";
    } else if (key == "rescale") {
        spec.rescale = to_bool(key, value);
    } else if (key == "smoothness") {
        spec.smoothness = value;
    } else if (key == "sigma-mode") {
        spec.sigma_mode = value;
    } else {
        return false;
    }
    return true;
}

ProblemPtr build_problem(const ProblemSpec& spec)
{
    ProblemPtr base;
    Rng rng(spec.seed);
    const std::string& type = spec.type;
    if (type.rfind("synthetic:", 0) == 0) {
        const int kind = to_int<int>("problem", type.substr(10));
        base = synthetic_generator(kind, spec.n, spec.seed);
    } else if (type == "quadratic") {
        if (spec.matrix.empty()) {
            throw ConfigError("problem quadratic needs a matrix file");
        }
        SmoothnessMatrix m(read_matrix_file(spec.matrix));
        Vector b(m.n());
        for (Eigen::Index i = 0; i < b.size(); ++i) {
            b[i] = rng.normal();
        }
        base = quadratic_problem(m, b);
    } else if (type == "logistic") {
        Vector labels;
        const Matrix a = load_data(spec, labels, rng, spec.m > 0 ? spec.m : 2 * spec.n, spec.n);
        double lambda = spec.lambda;
        if (spec.lambda_mode == "default" || spec.lambda_mode == "mean-diag") {
            lambda = logistic_lambda_mean_diag(a);
        } else if (spec.lambda_mode != "explicit") {
            throw ConfigError("logistic supports lambda-mode mean-diag or explicit, got '" + spec.lambda_mode + "'");
        }
        base = logistic_problem(a, labels, lambda);
    } else if (type == "svm-dual") {
        Vector labels;
        // One column per example for the dual.
        const Matrix a = load_data(spec, labels, rng, spec.n, spec.m > 0 ? spec.m : spec.n).transpose();
        double lambda = spec.lambda;
        if (spec.lambda_mode == "default" || spec.lambda_mode == "max-diag-over-10") {
            lambda = svm_lambda_max_diag_over_10(a, labels);
        } else if (spec.lambda_mode != "explicit") {
            throw ConfigError("svm-dual supports lambda-mode max-diag-over-10 or explicit, got '" +
                              spec.lambda_mode + "'");
        }
        base = svm_dual_problem(a, labels, lambda);
    } else {
        throw ConfigError("unknown problem type '" + type +
                          "' (expected quadratic, synthetic:<1-5>, logistic or svm-dual)");
    }

    const bool exact = spec.smoothness == "exact";
    std::string sigma_mode = spec.sigma_mode;
    if (sigma_mode == "auto") {
        sigma_mode = exact ? "exact" : "min-diag";
    }
    if (sigma_mode != "exact" && sigma_mode != "min-diag") {
        throw ConfigError("sigma-mode: expected auto, exact or min-diag, got '" + spec.sigma_mode + "'");
    }
    if (exact && sigma_mode == "exact") {
        return base;
    }
    const Vector& diag = base->smoothness().diag();
    const double sigma = sigma_mode == "exact" ? base->sigma() : diag.minCoeff();
    SmoothnessMatrix m = exact ? SmoothnessMatrix(base->smoothness().sym(), true)
                               : estimate_smoothness_diag(diag, estimate_factor(spec, base->n()));
    return with_estimates(base, std::move(m), sigma);
}

std::string_view to_string(Method m)
{
    return m == Method::Cd ? "cd" : "acd";
}

Method parse_method(std::string_view name)
{
    if (name == "cd") {
        return Method::Cd;
    }
    if (name == "acd") {
        return Method::Acd;
    }
    throw ConfigError("unknown method '" + std::string(name) + "' (expected cd or acd)");
}

std::string_view to_string(EsoChoice e)
{
    switch (e) {
    case EsoChoice::Auto: return "auto";
    case EsoChoice::Accelerated: return "accelerated";
    case EsoChoice::Plain: return "plain";
    case EsoChoice::Closed: return "closed";
    case EsoChoice::TauNice: return "tau-nice";
    }
    return "?";
}

EsoChoice parse_eso_choice(std::string_view name)
{
    for (EsoChoice e : {EsoChoice::Auto, EsoChoice::Accelerated, EsoChoice::Plain, EsoChoice::Closed,
                        EsoChoice::TauNice}) {
        if (to_string(e) == name) {
            return e;
        }
    }
    throw ConfigError("unknown ESO mode '" + std::string(name) +
                      "' (expected auto, accelerated, plain, closed or tau-nice)");
}

RunSetup prepare_run(const SmoothnessMatrix& m, Method method, Variant variant, double tau, EsoChoice eso)
{
    RunSetup setup{method, build_law(variant, m, tau), {}};
    if (eso == EsoChoice::Auto) {
        eso = method == Method::Cd ? EsoChoice::Plain : EsoChoice::Accelerated;
    }
    switch (eso) {
    case EsoChoice::Accelerated:
        setup.eso = c_accelerated(setup.law, m);
        break;
    case EsoChoice::Plain:
        setup.eso = c_plain(setup.law, m);
        break;
    case EsoChoice::Closed:
        setup.eso = eso_closed_form(setup.law, m);
        break;
    case EsoChoice::TauNice:
        if (variant != Variant::TauNice) {
            throw ConfigError("the tau-nice ESO needs the tau-nice sampling");
        }
        setup.eso = eso_tau_nice(m, setup.law.tau_int());
        break;
    case EsoChoice::Auto:
        break;
    }
    return setup;
}

SolverTrace execute_run(const ProblemPtr& problem, const RunSetup& setup, const SolverOptions& options,
                        std::uint64_t seed)
{
    Rng rng(seed);
    if (setup.method == Method::Cd) {
        return cd_run(problem, setup.law, setup.eso, options, rng);
    }
    if (problem->has_projection()) {
        return prox_acd_run(problem, setup.law, setup.eso, problem->sigma(), options, rng);
    }
    return acd_run(problem, setup.law, setup.eso, problem->sigma(), options, rng);
}

std::string method_label(Method method, Variant variant)
{
    const std::string head = method == Method::Cd ? "N" : "A";
    switch (variant) {
    case Variant::IndepAcdSolved:
    case Variant::IndepCdSolved: return head + "N";
    case Variant::IndepUniform: return head + "U";
    case Variant::IndepSqrtImportance: return head + "N2";
    default: return head + "-" + std::string(to_string(variant));
    }
}

ExperimentConfig parse_config(std::istream& in)
{
    ExperimentConfig cfg;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        const std::string body = trim(std::string_view(line).substr(0, hash));
        if (body.empty()) {
            continue;
        }
        const auto eq = body.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("line " + std::to_string(lineno) + ": expected 'key = value'");
        }
        const std::string key = trim(std::string_view(body).substr(0, eq));
        const std::string value = trim(std::string_view(body).substr(eq + 1));
        try {
            if (set_problem_key(cfg.problem, key, value)) {
            } else if (key == "methods") {
                cfg.methods.clear();
                for (const auto& item : split_list(value)) {
                    cfg.methods.push_back(parse_method(item));
                }
            } else if (key == "samplings") {
                cfg.samplings.clear();
                for (const auto& item : split_list(value)) {
                    cfg.samplings.push_back(parse_variant(item));
                }
            } else if (key == "taus") {
                cfg.taus.clear();
                for (const auto& item : split_list(value)) {
                    cfg.taus.push_back(to_double(key, item));
                }
            } else if (key == "seeds") {
                cfg.seeds.clear();
                for (const auto& item : split_list(value)) {
                    const auto dots = item.find("..");
                    if (dots == std::string::npos) {
                        cfg.seeds.push_back(to_int<std::uint64_t>(key, item));
                        continue;
                    }
                    const auto lo = to_int<std::uint64_t>(key, item.substr(0, dots));
                    const auto hi = to_int<std::uint64_t>(key, item.substr(dots + 2));
                    if (hi < lo) {
                        throw ConfigError("seeds: empty range '" + item + "'");
                    }
                    for (auto s = lo; s <= hi; ++s) {
                        cfg.seeds.push_back(s);
                    }
                }
            } else if (key == "seed") {
                cfg.seeds = {to_int<std::uint64_t>(key, value)};
            } else if (key == "budget-epochs") {
                cfg.budget_epochs = to_double(key, value);
            } else if (key == "eps") {
                cfg.eps = to_double(key, value);
            } else if (key == "checkpoint-epochs") {
                cfg.checkpoint_epochs = to_double(key, value);
            } else if (key == "eso") {
                cfg.eso = parse_eso_choice(value);
            } else if (key == "target-gap") {
                cfg.target_gap = to_double(key, value);
            } else if (key == "workers") {
                cfg.workers = to_int<int>(key, value);
            } else if (key == "timing") {
                cfg.timing = to_bool(key, value);
            } else {
                throw ConfigError("unknown key '" + key + "'");
            }
        } catch (const std::invalid_argument& e) {
            throw ConfigError("line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    if (cfg.methods.empty() || cfg.samplings.empty() || cfg.taus.empty() || cfg.seeds.empty()) {
        throw ConfigError("methods, samplings, taus and seeds must be nonempty");
    }
    if (!(cfg.budget_epochs > 0.0) || !(cfg.checkpoint_epochs > 0.0)) {
        throw ConfigError("budget-epochs and checkpoint-epochs must be positive");
    }
    if (cfg.workers < 1) {
        throw ConfigError("workers must be at least 1");
    }
    return cfg;
}

ExperimentConfig parse_config_file(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot open config file '" + path + "'");
    }
    try {
        return parse_config(in);
    } catch (const ConfigError& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

std::vector<GridRun> run_grid(const ExperimentConfig& config)
{
    return run_grid(config, build_problem(config.problem));
}

std::vector<GridRun> run_grid(const ExperimentConfig& config, const ProblemPtr& problem)
{
    const auto n = static_cast<double>(problem->n());
    for (double tau : config.taus) {
        if (!(tau >= 1.0 && tau <= n)) {
            throw ConfigError("tau " + short_number(tau) + " is outside [1, n] for n = " + short_number(n));
        }
    }

    // Laws and ESO constants depend on (method, sampling, tau) only.
    struct Prepared {
        std::optional<RunSetup> setup;
        std::string error;
    };
    std::vector<Prepared> prepared;
    for (Method method : config.methods) {
        for (Variant variant : config.samplings) {
            for (double tau : config.taus) {
                Prepared p;
                try {
                    RunSetup setup = prepare_run(problem->smoothness(), method, variant, tau, config.eso);
                    if (!problem->smoothness().is_estimate()) {
                        const double gap = verify_eso(setup.law, problem->smoothness(), setup.eso.v);
                        if (!eso_certified(gap, setup.law, setup.eso.v)) {
                            throw ConfigError("ESO parameters fail the certificate");
                        }
                    }
                    p.setup = std::move(setup);
                } catch (const std::exception& e) {
                    p.error = e.what();
                }
                prepared.push_back(std::move(p));
            }
        }
    }

    std::vector<GridRun> runs;
    std::vector<std::size_t> setup_of;
    std::size_t idx = 0;
    for (Method method : config.methods) {
        for (Variant variant : config.samplings) {
            for (double tau : config.taus) {
                for (auto seed : config.seeds) {
                    runs.push_back(GridRun{GridCell{method, variant, tau, seed}, {}});
                    setup_of.push_back(idx);
                }
                ++idx;
            }
        }
    }

    SolverOptions options;
    options.budget_epochs = config.budget_epochs;
    options.eps = config.eps;
    options.checkpoint_epochs = config.checkpoint_epochs;
    options.record_time = config.timing;
    options.verify_eso = false; // certified once per configuration above

    const auto run_one = [&](std::size_t i) {
        GridRun& run = runs[i];
        const Prepared& prep = prepared[setup_of[i]];
        try {
            if (!prep.setup) {
                throw ConfigError(prep.error);
            }
            run.trace = execute_run(problem, *prep.setup, options, run.cell.seed);
        } catch (const std::exception& e) {
            run.trace = SolverTrace{};
            run.trace.status = std::string("aborted: ") + e.what();
            TraceMeta& meta = run.trace.meta;
            meta.problem = problem->name();
            meta.n = problem->n();
            meta.method = std::string(to_string(run.cell.method));
            meta.sampling = std::string(to_string(run.cell.variant));
            meta.tau = run.cell.tau;
            meta.seed = run.cell.seed;
            meta.estimated = problem->smoothness().is_estimate();
        }
    };

    const auto workers = static_cast<std::size_t>(std::max(1, config.workers));
    if (workers == 1 || runs.size() < 2) {
        for (std::size_t i = 0; i < runs.size(); ++i) {
            run_one(i);
        }
        return runs;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < std::min(workers, runs.size()); ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < runs.size(); i = next++) {
                run_one(i);
            }
        });
    }
    for (auto& t : pool) {
        t.join();
    }
    return runs;
}

std::vector<SpeedupRow> speedup_table(const std::vector<GridRun>& runs, double target_gap)
{
    constexpr double inf = std::numeric_limits<double>::infinity();
    using Key = std::tuple<int, int, double>;
    std::map<Key, std::pair<std::vector<double>, std::vector<double>>> groups;
    std::vector<Key> order;
    for (const auto& run : runs) {
        const Key key{static_cast<int>(run.cell.method), static_cast<int>(run.cell.variant), run.cell.tau};
        auto [it, fresh] = groups.try_emplace(key);
        if (fresh) {
            order.push_back(key);
        }
        const auto hit = run.trace.status == "ok" ? first_reaching(run.trace, target_gap) : std::nullopt;
        it->second.first.push_back(hit ? hit->epochs : inf);
        it->second.second.push_back(hit ? static_cast<double>(hit->iter) : inf);
    }

    const auto median = [](std::vector<double> v) {
        std::sort(v.begin(), v.end());
        const std::size_t h = v.size() / 2;
        const double m = v.size() % 2 == 1 ? v[h] : 0.5 * (v[h - 1] + v[h]);
        return std::isfinite(m) ? std::optional<double>(m) : std::nullopt;
    };

    std::vector<SpeedupRow> rows;
    for (const auto& key : order) {
        const auto& [epochs, iters] = groups.at(key);
        SpeedupRow row;
        row.method = static_cast<Method>(std::get<0>(key));
        row.variant = static_cast<Variant>(std::get<1>(key));
        row.tau = std::get<2>(key);
        row.seeds = static_cast<int>(epochs.size());
        row.reached = static_cast<int>(std::count_if(epochs.begin(), epochs.end(), [](double e) {
            return std::isfinite(e);
        }));
        row.median_epochs = median(epochs);
        row.median_iterations = median(iters);
        rows.push_back(row);
    }
    for (auto& row : rows) {
        const auto base = std::find_if(rows.begin(), rows.end(), [&](const SpeedupRow& r) {
            return r.method == row.method && r.variant == row.variant && r.tau == 1.0;
        });
        if (base != rows.end() && base->median_iterations && row.median_iterations) {
            row.speedup = *base->median_iterations / *row.median_iterations;
        }
    }
    return rows;
}

void write_trace_csv(std::ostream& out, const SolverTrace& trace)
{
    std::string buf = trace_header;
    buf += '\n';
    for (const auto& cp : trace.checkpoints) {
        buf += std::to_string(cp.iter);
        buf += ',' + full_number(cp.epochs);
        buf += ',' + std::to_string(cp.coord_evals);
        buf += ',' + full_number(cp.f);
        buf += ',' + optional_number(cp.gap);
        buf += ',' + optional_number(cp.potential);
        buf += ',' + optional_number(cp.wall_ms);
        buf += '\n';
    }
    out << buf;
}

void emit_csv(const SolverTrace& trace, const std::string& path)
{
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw std::runtime_error("cannot write '" + path + "'");
    }
    write_trace_csv(out, trace);
    out.flush();
    if (!out) {
        throw std::runtime_error("write to '" + path + "' failed");
    }
}

std::vector<Checkpoint> parse_trace_csv(std::istream& in)
{
    std::string line;
    if (!std::getline(in, line) || trim(line) != trace_header) {
        throw ParseError("expected header '" + std::string(trace_header) + "'", 1);
    }
    std::vector<Checkpoint> out;
    std::size_t lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (trim(line).empty()) {
            continue;
        }
        const auto fields = split_list(line);
        if (fields.size() != 7) {
            throw ParseError("expected 7 fields", lineno);
        }
        const auto opt = [&](const std::string& s) -> std::optional<double> {
            if (s == "NA") {
                return std::nullopt;
            }
            return to_double("field", s);
        };
        try {
            Checkpoint cp;
            cp.iter = to_int<long>("iter", fields[0]);
            cp.epochs = to_double("epochs", fields[1]);
            cp.coord_evals = to_int<long>("coord_evals", fields[2]);
            cp.f = to_double("f", fields[3]);
            cp.gap = opt(fields[4]);
            cp.potential = opt(fields[5]);
            cp.wall_ms = opt(fields[6]);
            out.push_back(cp);
        } catch (const ConfigError& e) {
            throw ParseError(e.what(), lineno);
        }
    }
    return out;
}

void write_meta(std::ostream& out, const TraceMeta& meta, const std::string& status)
{
    std::ostringstream buf;
    buf << "key,value\n";
    buf << "status," << status << '\n';
    buf << "problem," << meta.problem << '\n';
    buf << "n," << meta.n << '\n';
    buf << "method," << meta.method << '\n';
    buf << "sampling," << meta.sampling << '\n';
    buf << "tau," << full_number(meta.tau) << '\n';
    buf << "expected_size," << full_number(meta.expected_size) << '\n';
    buf << "eso_mode," << meta.eso_mode << '\n';
    buf << "c," << full_number(meta.c) << '\n';
    buf << "p_min," << full_number(meta.p_min) << '\n';
    buf << "p_max," << full_number(meta.p_max) << '\n';
    buf << "v_min," << full_number(meta.v_min) << '\n';
    buf << "v_max," << full_number(meta.v_max) << '\n';
    buf << "delta," << optional_number(meta.delta) << '\n';
    buf << "theta," << optional_number(meta.theta) << '\n';
    buf << "sigma_w," << optional_number(meta.sigma_w) << '\n';
    buf << "seed," << meta.seed << '\n';
    buf << "estimated," << (meta.estimated ? "true" : "false") << '\n';
    buf << "experimental," << (meta.experimental ? "true" : "false") << '\n';
    out << buf.str();
}

std::string trace_file_name(const GridCell& cell)
{
    return std::string(to_string(cell.method)) + "_" + std::string(to_string(cell.variant)) + "_tau" +
           short_number(cell.tau) + "_seed" + std::to_string(cell.seed) + ".csv";
}

void write_speedup_csv(std::ostream& out, const std::vector<SpeedupRow>& rows)
{
    std::ostringstream buf;
    buf << "method,sampling,label,tau,seeds,reached,median_epochs,median_iterations,speedup\n";
    for (const auto& row : rows) {
        buf << to_string(row.method) << ',' << to_string(row.variant) << ',' << method_label(row.method, row.variant)
            << ',' << short_number(row.tau) << ',' << row.seeds << ',' << row.reached << ',';
        buf << (row.median_epochs ? full_number(*row.median_epochs) : unreached_sentinel) << ',';
        buf << (row.median_iterations ? full_number(*row.median_iterations) : unreached_sentinel) << ',';
        buf << (row.speedup ? full_number(*row.speedup) : (row.median_iterations ? "NA" : unreached_sentinel))
            << '\n';
    }
    out << buf.str();
}

void write_grid(const std::string& out_dir, const std::vector<GridRun>& runs, const std::vector<SpeedupRow>& rows)
{
    namespace fs = std::filesystem;
    fs::create_directories(out_dir);
    const auto open = [](const fs::path& path) {
        std::ofstream out(path, std::ios::binary);
        if (!out) {
            throw std::runtime_error("cannot write '" + path.string() + "'");
        }
        return out;
    };

    std::ostringstream index;
    index << "file,status,label,problem,n,method,sampling,tau,expected_size,eso_mode,c,p_min,p_max,v_min,v_max,"
             "delta,theta,sigma_w,seed,estimated,experimental\n";
    for (const auto& run : runs) {
        const std::string name = trace_file_name(run.cell);
        emit_csv(run.trace, (fs::path(out_dir) / name).string());
        const TraceMeta& m = run.trace.meta;
        std::string status = run.trace.status;
        std::replace(status.begin(), status.end(), ',', ';');
        index << name << ',' << status << ',' << method_label(run.cell.method, run.cell.variant) << ','
              << m.problem << ',' << m.n << ',' << m.method << ',' << m.sampling << ',' << full_number(m.tau) << ','
              << full_number(m.expected_size) << ',' << m.eso_mode << ',' << full_number(m.c) << ','
              << full_number(m.p_min) << ',' << full_number(m.p_max) << ',' << full_number(m.v_min) << ','
              << full_number(m.v_max) << ',' << optional_number(m.delta) << ',' << optional_number(m.theta) << ','
              << optional_number(m.sigma_w) << ',' << m.seed << ',' << (m.estimated ? "true" : "false") << ','
              << (m.experimental ? "true" : "false") << '\n';
    }
    auto index_out = open(fs::path(out_dir) / "index.csv");
    index_out << index.str();
    auto speedup_out = open(fs::path(out_dir) / "speedup.csv");
    write_speedup_csv(speedup_out, rows);
}

} // namespace acd

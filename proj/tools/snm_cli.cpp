// snm - command-line front end: codebook inspection, outage/BLER/throughput
// sweeps, rate tables, and figure presets emitting CSV series.

#include <cstdio>
#include <ctime>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "snm/snm.hpp"

namespace {

struct CsvRow {
    double snr_db;
    std::string series;
    double value;
    double ci_low;
    double ci_high;
    std::int64_t trials;
};

struct SweepFlags {
    int n = 4;
    int m = 2;
    std::string scheme = "enhanced";
    std::uint64_t seed = 1;
    std::int64_t trials = 0;  // 0 -> per-metric default
    double snr_start = 0.0;
    double snr_stop = 40.0;
    double snr_step = 5.0;
    int workers = 1;
    double xi = 1.0;
    double mu = 1.0;
    std::string protocol = "none";
    double phi = 1.0;
    int secondaries = 1;
    double theta = 0.2;
    double varrho = 1.0;
    double ps_db = 20.0;
    std::string out;
    bool no_metadata = false;
};

void add_sweep_flags(CLI::App* cmd, SweepFlags& f, bool with_protocol) {
    cmd->add_option("--n", f.n, "Subcarrier count N (power of two)");
    cmd->add_option("--m", f.m, "PSK order M (power of two)");
    cmd->add_option("--scheme", f.scheme, "Mapping scheme")
        ->check(CLI::IsMember({"enhanced", "original", "halved"}));
    cmd->add_option("--seed", f.seed, "64-bit master seed");
    cmd->add_option("--trials", f.trials, "Monte Carlo trials per SNR point");
    cmd->add_option("--snr-start", f.snr_start, "First P_t/N_0 point (dB)");
    cmd->add_option("--snr-stop", f.snr_stop, "Last P_t/N_0 point (dB)");
    cmd->add_option("--snr-step", f.snr_step, "Grid step (dB)")->check(CLI::PositiveNumber);
    cmd->add_option("--workers", f.workers, "Parallel worker threads")->check(CLI::PositiveNumber);
    cmd->add_option("--xi", f.xi, "Outage SNR threshold (linear)");
    cmd->add_option("--mu", f.mu, "Average channel power gain (linear)");
    cmd->add_option("--out", f.out, "Output CSV path (default: standard output)");
    cmd->add_flag("--no-metadata", f.no_metadata, "Suppress the timestamp comment line");
    if (with_protocol) {
        cmd->add_option("--protocol", f.protocol, "Secondary-user protocol")
            ->check(CLI::IsMember({"none", "unregulated", "regulated"}));
        cmd->add_option("--phi", f.phi, "Interference threshold phi (linear, regulated only)");
        cmd->add_option("--secondaries", f.secondaries, "Number of secondary users L");
        cmd->add_option("--theta", f.theta, "Mean interference channel gain theta (linear)");
        cmd->add_option("--varrho", f.varrho, "Mean secondary transmission gain (linear)");
        cmd->add_option("--ps-db", f.ps_db, "Secondary power P_s/N_0 (dB)");
    }
}

std::vector<double> make_grid(const SweepFlags& f) {
    std::vector<double> grid;
    for (double s = f.snr_start; s <= f.snr_stop + 1e-9; s += f.snr_step) grid.push_back(s);
    if (grid.empty()) throw std::invalid_argument("empty SNR grid: check --snr-start/stop/step");
    return grid;
}

snm::Scheme parse_scheme(const std::string& s) {
    if (s == "enhanced") return snm::Scheme::enhanced;
    if (s == "original") return snm::Scheme::original;
    if (s == "halved") return snm::Scheme::halved;
    throw std::invalid_argument("unknown scheme: " + s);
}

snm::ExperimentSpec make_spec(const SweepFlags& f, snm::Metric metric) {
    snm::ExperimentSpec spec;
    spec.config.n_subcarriers = f.n;
    spec.config.psk_order = f.m;
    spec.config.noise_power = 1.0;
    spec.config.outage_threshold = f.xi;
    spec.config.avg_channel_gain = f.mu;
    spec.snr_db_grid = make_grid(f);
    spec.trials_per_point =
        f.trials > 0 ? f.trials : (metric == snm::Metric::outage ? 1000000 : 100000);
    spec.master_seed = f.seed;
    spec.scheme = parse_scheme(f.scheme);
    spec.metric = metric;
    spec.workers = f.workers;
    if (f.protocol != "none") {
        snm::MultiUserScenario sc;
        sc.n_secondary = f.secondaries;
        sc.secondary_power = std::pow(10.0, f.ps_db / 10.0);
        sc.interference_gain = f.theta;
        sc.transmission_gain = f.varrho;
        if (f.protocol == "regulated") {
            sc.protocol = snm::MultiUserScenario::Protocol::regulated;
            sc.threshold = f.phi;
        }
        spec.multiuser = sc;
    }
    return spec;
}

void append_sweep(std::vector<CsvRow>& rows, const snm::SweepResult& r, const std::string& name) {
    for (const auto& p : r.points) {
        rows.push_back({p.snr_db, name, p.estimate, p.ci_low, p.ci_high, p.trials});
    }
}

void write_csv(const std::string& path, const std::vector<CsvRow>& rows, bool no_metadata) {
    std::ostringstream body;
    if (!no_metadata) {
        char stamp[64];
        const std::time_t now = std::time(nullptr);
        std::tm tm_utc{};
        gmtime_r(&now, &tm_utc);
        std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", &tm_utc);
        body << "# generated " << stamp << "\n";
    }
    body << "snr_db,series,value,ci_low,ci_high,trials\n";
    char line[256];
    for (const auto& r : rows) {
        std::snprintf(line, sizeof line, "%.10g,%s,%.12g,%.12g,%.12g,%lld\n", r.snr_db,
                      r.series.c_str(), r.value, r.ci_low, r.ci_high,
                      static_cast<long long>(r.trials));
        body << line;
    }
    if (path.empty()) {
        std::cout << body.str();
    } else {
        std::ofstream out(path, std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open output file: " + path);
        out << body.str();
    }
}

std::string format_complex(const std::complex<double>& z) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%+.4g%+.4gj", z.real(), z.imag());
    return buf;
}

int cmd_codebook(const std::vector<double>& gains_flag, int n, int m, const std::string& scheme,
                 const std::string& out_path) {
    std::vector<double> gains = gains_flag;
    if (gains.empty()) gains.assign(static_cast<std::size_t>(n), 1.0);
    if (static_cast<int>(gains.size()) != n) {
        throw std::invalid_argument("--gains must list exactly N values");
    }
    snm::SystemConfig cfg;
    cfg.n_subcarriers = n;
    cfg.psk_order = m;
    const snm::Codebook cb(gains, cfg, parse_scheme(scheme));
    std::ostringstream body;
    body << "k,bits,heading,subsequent,sap,x\n";
    for (const auto& e : cb.entries()) {
        body << (e.index + 1) << ',' << snm::Codebook::decode(e).str() << ',' << e.heading.str()
             << ',' << e.subsequent.str() << ',';
        for (int i = 0; i < n; ++i) body << (e.block.sap.is_active(i) ? '1' : '0');
        body << ',';
        for (int i = 0; i < n; ++i) {
            if (i) body << ';';
            body << format_complex(e.block.symbols[static_cast<std::size_t>(i)]);
        }
        body << '\n';
    }
    if (out_path.empty()) {
        std::cout << body.str();
    } else {
        std::ofstream out(out_path, std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open output file: " + out_path);
        out << body.str();
    }
    return 0;
}

int cmd_rates(const std::string& mode, int n, const std::string& out_path) {
    std::ostringstream body;
    if (mode == "im") {
        body << "n,t,min_m\n";
        for (int t = 1; t < n; ++t) {
            const auto m = snm::min_psk_vs_im(n, t);
            body << n << ',' << t << ',';
            if (m) {
                body << *m;
            } else {
                body << "none";
            }
            body << '\n';
        }
    } else if (mode == "ofdm") {
        body << "n,bound,m_set\n";
        for (int nn : {2, 4, 8}) {
            if (n != 0 && nn != n) continue;
            const double bound = std::pow(static_cast<double>(nn), 2.0 / (nn - 1));
            const auto set = snm::psk_set_vs_ofdm(nn);
            char b[32];
            std::snprintf(b, sizeof b, "%.6g", bound);
            body << nn << ',' << b << ',';
            if (set.empty()) {
                body << "none";
            } else {
                for (std::size_t i = 0; i < set.size(); ++i) {
                    if (i) body << ';';
                    body << set[i];
                }
            }
            body << '\n';
        }
    } else {
        throw std::invalid_argument("rates --mode must be im or ofdm");
    }
    if (out_path.empty()) {
        std::cout << body.str();
    } else {
        std::ofstream out(out_path, std::ios::trunc);
        if (!out) throw std::runtime_error("cannot open output file: " + out_path);
        out << body.str();
    }
    return 0;
}

int cmd_outage(const SweepFlags& f) {
    std::vector<CsvRow> rows;
    snm::ExperimentSpec spec = make_spec(f, snm::Metric::outage);
    for (double snr : spec.snr_db_grid) {
        const snm::SystemConfig cfg = spec.config.at_snr_db(snr);
        const bool fixed = spec.scheme == snm::Scheme::original;
        const double exact =
            fixed ? snm::average_outage_fixed(cfg) : snm::average_outage(cfg);
        rows.push_back({snr, "analytic", exact, exact, exact, 0});
        if (!fixed && spec.scheme != snm::Scheme::halved) {
            const double asym = snm::asymptotic_average_outage(cfg);
            rows.push_back({snr, "asymptotic", asym, asym, asym, 0});
        }
    }
    append_sweep(rows, snm::run_outage_sweep(spec), "sim_" + f.scheme);
    write_csv(f.out, rows, f.no_metadata);
    return 0;
}

int cmd_bler(const SweepFlags& f) {
    std::vector<CsvRow> rows;
    snm::ExperimentSpec spec = make_spec(f, snm::Metric::bler);
    if (spec.scheme != snm::Scheme::halved && !spec.multiuser) {
        for (double snr : spec.snr_db_grid) {
            const double b = snm::average_bler(spec.config.at_snr_db(snr)).union_bound;
            rows.push_back({snr, "union_bound", b, b, b, 0});
        }
    }
    const std::string name =
        spec.multiuser ? "sim_" + f.scheme + "_" + f.protocol : "sim_" + f.scheme;
    append_sweep(rows, snm::detail::run_sweep(spec), name);
    write_csv(f.out, rows, f.no_metadata);
    return 0;
}

int cmd_throughput(const SweepFlags& f) {
    std::vector<CsvRow> rows;
    snm::ExperimentSpec spec = make_spec(f, snm::Metric::throughput);
    append_sweep(rows, snm::run_throughput_sweep(spec), "sim_" + f.scheme);
    write_csv(f.out, rows, f.no_metadata);
    return 0;
}

int cmd_figure(const std::string& id, SweepFlags f) {
    if (f.out.empty()) f.out = "fig" + id + ".csv";
    std::vector<CsvRow> rows;
    const auto run = [&](snm::Metric metric, const std::string& scheme, const std::string& name,
                         std::int64_t default_trials, double snr_stop,
                         std::optional<snm::MultiUserScenario> mu = std::nullopt) {
        SweepFlags g = f;
        g.scheme = scheme;
        g.snr_start = 0.0;
        g.snr_stop = snr_stop;
        g.snr_step = 5.0;
        if (g.trials <= 0) g.trials = default_trials;
        snm::ExperimentSpec spec = make_spec(g, metric);
        spec.multiuser = mu;
        append_sweep(rows, snm::detail::run_sweep(spec), name);
    };
    if (id == "2") {
        SweepFlags g = f;
        g.snr_start = 0.0;
        g.snr_stop = 50.0;
        g.snr_step = 5.0;
        const snm::ExperimentSpec spec = make_spec(g, snm::Metric::outage);
        for (double snr : spec.snr_db_grid) {
            const snm::SystemConfig cfg = spec.config.at_snr_db(snr);
            const double exact = snm::average_outage(cfg);
            const double asym = snm::asymptotic_average_outage(cfg);
            rows.push_back({snr, "analytic", exact, exact, exact, 0});
            rows.push_back({snr, "asymptotic", asym, asym, asym, 0});
        }
        run(snm::Metric::outage, "enhanced", "sim_enhanced", 1000000, 50.0);
        run(snm::Metric::outage, "original", "sim_original", 1000000, 50.0);
    } else if (id == "3") {
        SweepFlags g = f;
        g.snr_start = 0.0;
        g.snr_stop = 40.0;
        g.snr_step = 5.0;
        const snm::ExperimentSpec spec = make_spec(g, snm::Metric::bler);
        for (double snr : spec.snr_db_grid) {
            const double b = snm::average_bler(spec.config.at_snr_db(snr)).union_bound;
            rows.push_back({snr, "union_bound", b, b, b, 0});
        }
        run(snm::Metric::bler, "enhanced", "sim", 100000, 40.0);
    } else if (id == "4a" || id == "4b") {
        f.m = (id == "4a") ? 2 : 4;
        run(snm::Metric::throughput, "enhanced", "sim_enhanced", 100000, 40.0);
        run(snm::Metric::throughput, "original", "sim_original", 100000, 40.0);
    } else if (id == "5a" || id == "5b" || id == "5c") {
        const snm::Metric metric = (id == "5a")   ? snm::Metric::outage
                                   : (id == "5b") ? snm::Metric::bler
                                                  : snm::Metric::throughput;
        const std::int64_t trials = (id == "5a") ? 1000000 : 100000;
        run(metric, "enhanced", "sim_enhanced", trials, 40.0);
        run(metric, "halved", "sim_halved", trials, 40.0);
    } else if (id == "6") {
        snm::MultiUserScenario base;
        base.n_secondary = 1;
        base.interference_gain = 0.2;
        base.transmission_gain = 1.0;
        base.secondary_power = std::pow(10.0, 20.0 / 10.0);
        run(snm::Metric::bler, "enhanced", "single_user", 100000, 50.0);
        run(snm::Metric::bler, "enhanced", "unregulated", 100000, 50.0, base);
        snm::MultiUserScenario reg = base;
        reg.protocol = snm::MultiUserScenario::Protocol::regulated;
        reg.threshold = 1e-3;
        run(snm::Metric::bler, "enhanced", "regulated_phi_1e-3", 100000, 50.0, reg);
        reg.threshold = 1e3;
        run(snm::Metric::bler, "enhanced", "regulated_phi_1e3", 100000, 50.0, reg);
    } else {
        throw std::invalid_argument("unknown figure id: " + id);
    }
    write_csv(f.out, rows, f.no_metadata);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Link-level simulator and closed-form analytics for OFDM with "
                 "subcarrier number modulation"};
    app.require_subcommand(1);
    app.set_config("--config", "", "Flat key=value config file; flags override file values");

    // codebook
    auto* cb = app.add_subcommand("codebook", "Print the block mapping table");
    int cb_n = 4, cb_m = 2;
    std::string cb_scheme = "enhanced", cb_out;
    std::vector<double> cb_gains;
    cb->add_option("--n", cb_n, "Subcarrier count N");
    cb->add_option("--m", cb_m, "PSK order M");
    cb->add_option("--scheme", cb_scheme, "Mapping scheme")
        ->check(CLI::IsMember({"enhanced", "original", "halved"}));
    cb->add_option("--gains", cb_gains, "Channel power gains, N comma-separated linear values")
        ->delimiter(',');
    cb->add_option("--out", cb_out, "Output path (default: standard output)");

    // sweeps
    SweepFlags of, bf, tf;
    auto* outage = app.add_subcommand("outage", "Average outage probability vs P_t/N_0");
    add_sweep_flags(outage, of, false);
    auto* bler = app.add_subcommand("bler", "Average block error rate vs P_t/N_0");
    add_sweep_flags(bler, bf, true);
    auto* thr = app.add_subcommand("throughput", "Average throughput (bpcu) vs P_t/N_0");
    add_sweep_flags(thr, tf, false);

    // rates
    auto* rates = app.add_subcommand("rates", "Rate-comparison tables");
    std::string rates_mode, rates_out;
    int rates_n = 0;
    rates->add_option("--mode", rates_mode, "im: minimum M vs OFDM-IM; ofdm: M set vs plain OFDM")
        ->required()
        ->check(CLI::IsMember({"im", "ofdm"}));
    rates->add_option("--n", rates_n, "Subcarrier count N (im mode; optional filter in ofdm mode)");
    rates->add_option("--out", rates_out, "Output path (default: standard output)");

    // figure presets
    auto* fig = app.add_subcommand("figure", "Preset sweeps emitting one CSV with all series");
    std::string fig_id;
    SweepFlags ff;
    fig->add_option("--id", fig_id, "Figure id: 2, 3, 4a, 4b, 5a, 5b, 5c, 6")
        ->required()
        ->check(CLI::IsMember({"2", "3", "4a", "4b", "5a", "5b", "5c", "6"}));
    add_sweep_flags(fig, ff, false);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (cb->parsed()) return cmd_codebook(cb_gains, cb_n, cb_m, cb_scheme, cb_out);
        if (outage->parsed()) return cmd_outage(of);
        if (bler->parsed()) return cmd_bler(bf);
        if (thr->parsed()) return cmd_throughput(tf);
        if (rates->parsed()) {
            if (rates_mode == "im" && rates_n == 0) rates_n = 4;
            return cmd_rates(rates_mode, rates_n, rates_out);
        }
        if (fig->parsed()) return cmd_figure(fig_id, ff);
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}

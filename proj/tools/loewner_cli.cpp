// Command-line driver for the toolkit.  Every pipeline is a subcommand:
//
//   make-control      write a builtin control file
//   integrate         run the coefficient flow, report the final jet
//   limit-map         rescaled flow limit and coefficient jet
//   schiffer-check    residual + boundary positivity for a map jet
//   pmp-check         transport-functional gap along a control
//   optimize          multi-start coefficient maximization
//   sample-reachable  seeded point cloud of limit-map coefficients
//   teichmueller      perturb-and-restore side-condition experiment
//
// Structured reports are JSON (stdout, or --out FILE); point clouds and
// sample tables additionally go to CSV via --csv FILE.  Every report embeds
// the schema version, the tool version, and an echo of the run
// configuration.  Exit codes: 0 success, 2 invalid input, 3 numerical guard.

#include <array>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "loewner/io.hpp"

namespace {

using namespace loewner;

struct GlobalOpts {
    int order = 12;
    double step = 1.0 / 64;
    double horizon = 0.0;  // 0 = command-specific default
    std::uint64_t seed = 1;
    std::string out;
    std::string csv;
};

struct ControlSource {
    std::string file;
    std::string builtin;

    DrivingControl resolve() const {
        if (!file.empty()) return load_control(file);
        if (!builtin.empty()) return builtin_control(builtin);
        throw ValidationError("need --control FILE or --builtin NAME");
    }

    void echo(json& config) const {
        if (!file.empty()) config["control"] = file;
        if (!builtin.empty()) config["builtin"] = builtin;
    }
};

void add_control_source(CLI::App* cmd, ControlSource& src) {
    auto* f = cmd->add_option("--control", src.file, "control JSON file");
    auto* b = cmd->add_option("--builtin", src.builtin,
                              "builtin control name (see make-control)");
    f->excludes(b);
}

void emit_report(const json& report, const GlobalOpts& g) {
    std::string text = report.dump(2) + "\n";
    if (g.out.empty())
        std::cout << text;
    else
        write_text_file(g.out, text);
}

void emit_csv(const std::string& csv, const GlobalOpts& g) {
    if (!g.csv.empty()) write_text_file(g.csv, csv);
}

json base_config(const GlobalOpts& g) {
    return json{{"order", g.order}, {"step", g.step}};
}

// a_N = N for the Koebe function; used by --koebe without running the flow
Jet1 analytic_koebe_jet(int order) {
    Jet1 k(order);
    for (int n = 1; n <= order; ++n) k.at(n) = cx{double(n)};
    return k;
}

std::string builtin_comment(const std::string& name) {
    std::size_t colon = name.find(':');
    std::string head =
        colon == std::string::npos ? name : name.substr(0, colon);
    std::string arg = colon == std::string::npos ? "" : name.substr(colon + 1);
    if (head == "koebe")
        return "constant atom at angle pi, weight 1; the limit map is the "
               "Koebe function with a_N = N";
    if (head == "koebe-rotated")
        return "constant atom at angle pi - " + arg +
               "; the limit map has a_N = N exp(i (N-1) " + arg + ")";
    if (head == "rotating")
        return "80 quarter-length pieces, atom angle " + arg +
               " * t at piece midpoints";
    if (head == "random")
        return "seeded draw " + arg + "; horizon in [2, 8], five pieces";
    return "";
}

int run_cli(int argc, char** argv) {
    GlobalOpts g;
    CLI::App app{"coefficient flows, extremality checks, and optimization "
                 "for normalized univalent maps"};
    app.require_subcommand(1);
    app.fallthrough();
    app.add_option("--order", g.order, "jet truncation order")
        ->check(CLI::PositiveNumber);
    app.add_option("--step", g.step, "integration step size")
        ->check(CLI::PositiveNumber);
    app.add_option("--horizon", g.horizon, "time horizon (0 = default)");
    app.add_option("--seed", g.seed, "base seed for seeded draws");
    app.add_option("--out", g.out, "write the JSON report here");
    app.add_option("--csv", g.csv, "write the CSV table here");

    // make-control
    auto* mk = app.add_subcommand("make-control", "write a builtin control");
    std::string mk_name;
    mk->add_option("--builtin", mk_name, "builtin control name")->required();
    mk->callback([&] {
        DrivingControl c = builtin_control(mk_name);
        json doc = control_to_json(c, builtin_comment(mk_name));
        std::string text = doc.dump(2) + "\n";
        if (g.out.empty())
            std::cout << text;
        else
            write_text_file(g.out, text);
    });

    // integrate
    auto* integ = app.add_subcommand("integrate", "run the coefficient flow");
    ControlSource integ_src;
    add_control_source(integ, integ_src);
    integ->callback([&] {
        DrivingControl c = integ_src.resolve();
        json config = base_config(g);
        integ_src.echo(config);
        config["control_hash"] = control_hash(c);
        json report = report_envelope("integrate", config);
        if (c.dimension() == 1) {
            Trajectory traj = integrate(c, g.order, g.step);
            report["horizon"] = c.horizon;
            report["samples"] = traj.times.size();
            report["final_jet"] = jet_to_json(traj.jets.back());
            emit_csv(trajectory_to_csv(traj), g);
        } else {
            Trajectory2 traj = integrate2(c, g.order, g.step);
            report["horizon"] = c.horizon;
            report["samples"] = traj.times.size();
            report["final_jet"] = jet2_to_json(traj.jets.back());
        }
        emit_report(report, g);
    });

    // limit-map
    auto* lim = app.add_subcommand("limit-map", "rescaled flow limit");
    ControlSource lim_src;
    add_control_source(lim, lim_src);
    lim->callback([&] {
        DrivingControl c = lim_src.resolve();
        json config = base_config(g);
        lim_src.echo(config);
        config["control_hash"] = control_hash(c);
        json report = report_envelope("limit-map", config);
        if (c.dimension() == 1)
            report["limit_map"] = limit_map_to_json(limit_map(c, g.order, g.step));
        else
            report["limit_map"] =
                limit_map2_to_json(limit_map2(c, g.order, g.step));
        emit_report(report, g);
    });

    // schiffer-check
    auto* sch = app.add_subcommand("schiffer-check",
                                   "residual and boundary positivity");
    ControlSource sch_src;
    add_control_source(sch, sch_src);
    int sch_n = 2;
    bool sch_koebe = false;
    bool sch_identity = false;
    sch->add_option("--N", sch_n, "target coefficient index")->required();
    sch->add_flag("--koebe", sch_koebe, "check the Koebe jet a_N = N");
    sch->add_flag("--identity", sch_identity, "check the identity map F = z");
    sch->callback([&] {
        json config = base_config(g);
        config["N"] = sch_n;
        Jet1 F(0);
        if (sch_koebe) {
            F = analytic_koebe_jet(g.order);
            config["map"] = "koebe";
        } else if (sch_identity) {
            F = Jet1(g.order);
            F.at(1) = cx{1.0};
            config["map"] = "identity";
        } else {
            DrivingControl c = sch_src.resolve();
            if (c.dimension() != 1)
                throw ValidationError(
                    "schiffer-check handles one-variable controls");
            sch_src.echo(config);
            config["control_hash"] = control_hash(c);
            F = normalized_map(limit_map(c, g.order, g.step).jet);
        }
        json report = report_envelope("schiffer-check", config);
        report["schiffer"] = schiffer_report_to_json(schiffer_check(F, sch_n));
        emit_report(report, g);
    });

    // pmp-check
    auto* pmp = app.add_subcommand("pmp-check", "transport-functional gap");
    ControlSource pmp_src;
    add_control_source(pmp, pmp_src);
    int pmp_n = 2;
    int pmp_samples = 64;
    pmp->add_option("--N", pmp_n, "target coefficient index")->required();
    pmp->add_option("--samples", pmp_samples, "number of sample times")
        ->check(CLI::PositiveNumber);
    pmp->callback([&] {
        DrivingControl c = pmp_src.resolve();
        json config = base_config(g);
        pmp_src.echo(config);
        config["control_hash"] = control_hash(c);
        config["N"] = pmp_n;
        config["samples"] = pmp_samples;
        PmpReport r = pmp_check(c, pmp_n, pmp_samples, g.order, g.step);
        json report = report_envelope("pmp-check", config);
        report["pmp"] = pmp_report_to_json(r);
        emit_csv(pmp_report_to_csv(r), g);
        emit_report(report, g);
    });

    // optimize
    auto* opt = app.add_subcommand("optimize", "multi-start maximization");
    int opt_dim = 1;
    int opt_n = 2;
    std::vector<int> opt_alpha{2, 0};
    int opt_pieces = 8;
    int opt_restarts = 8;
    std::vector<std::string> opt_pins;
    opt->add_option("--dimension", opt_dim, "1 or 2")->check(CLI::Range(1, 2));
    opt->add_option("--N", opt_n, "target coefficient index (dimension 1)");
    opt->add_option("--alpha", opt_alpha,
                    "target multi-index j k (dimension 2)")
        ->expected(2);
    opt->add_option("--pieces", opt_pieces, "control pieces")
        ->check(CLI::PositiveNumber);
    opt->add_option("--restarts", opt_restarts, "simplex restarts")
        ->check(CLI::PositiveNumber);
    opt->add_option("--pin", opt_pins,
                    "side condition k=re[,im], repeatable (dimension 1)");
    opt->callback([&] {
        OptimizeProblem p;
        p.dimension = opt_dim;
        p.target_index = opt_n;
        p.target_alpha = {opt_alpha[0], opt_alpha[1]};
        p.pieces = opt_pieces;
        p.horizon = g.horizon;
        p.step = g.step;
        p.restarts = opt_restarts;
        p.seed = g.seed;
        for (const std::string& spec : opt_pins) {
            std::size_t eq = spec.find('=');
            if (eq == std::string::npos)
                throw ValidationError("--pin expects k=re[,im]");
            SideCondition cond;
            cond.index = static_cast<int>(
                detail::parse_double_arg(spec.substr(0, eq), "--pin"));
            std::string rhs = spec.substr(eq + 1);
            std::size_t comma = rhs.find(',');
            double re = detail::parse_double_arg(
                comma == std::string::npos ? rhs : rhs.substr(0, comma),
                "--pin");
            double im = comma == std::string::npos
                            ? 0.0
                            : detail::parse_double_arg(rhs.substr(comma + 1),
                                                       "--pin");
            cond.value = cx{re, im};
            p.conditions.push_back(cond);
        }
        json config{{"dimension", p.dimension}, {"pieces", p.pieces},
                    {"horizon", p.horizon},     {"step", p.step},
                    {"restarts", p.restarts},   {"seed", p.seed},
                    {"threads", detail::thread_budget()}};
        if (p.dimension == 1)
            config["N"] = p.target_index;
        else
            config["alpha"] = json::array({p.target_alpha[0], p.target_alpha[1]});
        if (!opt_pins.empty()) config["pin"] = opt_pins;
        OptimizeResult r = optimize(p);
        json report = report_envelope("optimize", config);
        report["result"] = optimize_result_to_json(r);
        emit_report(report, g);
    });

    // sample-reachable
    auto* smp = app.add_subcommand("sample-reachable",
                                   "seeded coefficient point cloud");
    int smp_dim = 1;
    int smp_count = 1000;
    int smp_pieces = 4;
    std::vector<int> smp_targets{2};
    std::vector<int> smp_alpha;
    smp->add_option("--dimension", smp_dim, "1 or 2")->check(CLI::Range(1, 2));
    smp->add_option("--count", smp_count, "number of samples")
        ->check(CLI::PositiveNumber);
    smp->add_option("--pieces", smp_pieces, "control pieces")
        ->check(CLI::PositiveNumber);
    smp->add_option("--targets", smp_targets,
                    "coefficient indices (dimension 1)");
    smp->add_option("--alpha", smp_alpha,
                    "flattened multi-index pairs j k ... (dimension 2)");
    smp->callback([&] {
        double horizon = g.horizon > 0.0 ? g.horizon : 6.0;
        json config{{"dimension", smp_dim}, {"count", smp_count},
                    {"pieces", smp_pieces}, {"horizon", horizon},
                    {"seed", g.seed},       {"threads", detail::thread_budget()}};
        ReachableSample s;
        if (smp_dim == 1) {
            config["targets"] = smp_targets;
            s = sample_reachable(smp_targets, smp_count, horizon, smp_pieces,
                                 g.seed);
        } else {
            if (smp_alpha.empty()) smp_alpha = {2, 0};
            if (smp_alpha.size() % 2 != 0)
                throw ValidationError("--alpha expects pairs j k");
            std::vector<std::array<int, 2>> targets;
            for (std::size_t i = 0; i + 1 < smp_alpha.size(); i += 2)
                targets.push_back({smp_alpha[i], smp_alpha[i + 1]});
            config["alpha"] = smp_alpha;
            s = sample_reachable2(targets, smp_count, horizon, smp_pieces,
                                  g.seed);
        }
        json report = report_envelope("sample-reachable", config);
        report["reachable"] = reachable_to_json(s);
        emit_csv(reachable_to_csv(s), g);
        emit_report(report, g);
    });

    // teichmueller
    auto* tei = app.add_subcommand("teichmueller",
                                   "perturb-and-restore experiment");
    ControlSource tei_src;
    add_control_source(tei, tei_src);
    int tei_n = 3;
    int tei_perturbations = 20;
    tei->add_option("--N", tei_n, "target coefficient index");
    tei->add_option("--perturbations", tei_perturbations,
                    "number of perturbed samples");
    tei->callback([&] {
        DrivingControl base =
            tei_src.file.empty() && tei_src.builtin.empty()
                ? builtin_control("koebe")
                : tei_src.resolve();
        json config{{"N", tei_n},
                    {"perturbations", tei_perturbations},
                    {"seed", g.seed},
                    {"threads", detail::thread_budget()},
                    {"control_hash", control_hash(base)}};
        tei_src.echo(config);
        TeichmuellerReport r =
            teichmueller_experiment(tei_n, base, tei_perturbations, g.seed);
        json report = report_envelope("teichmueller", config);
        report["teichmueller"] = teichmueller_report_to_json(r);
        emit_report(report, g);
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run_cli(argc, argv);
    } catch (const loewner::ValidationError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const loewner::NumericalError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}

#include "conet/cli.hpp"

#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "json.hpp"

#include "conet/errors.hpp"
#include "conet/levy.hpp"
#include "conet/net.hpp"
#include "conet/surface.hpp"
#include "conet/verify.hpp"
#include "conet/wronski.hpp"

namespace conet {

namespace {

struct Options {
    std::string config;
    std::string mode = "float";
    std::uint64_t rng_seed = 12345;
    std::string grid;
    std::string format = "obj";
    std::string out;
};

nlohmann::ordered_json bases_json(const std::vector<Rat>& bases) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const Rat& b : bases) arr.push_back(b.get_str());
    return arr;
}

void write_text(const std::string& path, const std::string& body) {
    std::ofstream os(path);
    if (!os) throw DomainError("cannot open output file '" + path + "'");
    os << body;
    if (!os.flush()) throw DomainError("failed writing output file '" + path + "'");
}

// cfg.steps is usable as the equivalence order only if it applies m_i steps
// per direction with pairwise distinct seeds.
bool order_matches(const Partition& p, const std::vector<Step>& steps, const NetState& s0) {
    std::vector<int> count(static_cast<std::size_t>(s0.N), 0);
    std::vector<std::string> seen;
    for (const Step& st : steps) {
        if (st.direction < 0 || st.direction >= s0.N) return false;
        if (s0.seed_index(st.seed) < 0) return false;
        if (std::find(seen.begin(), seen.end(), st.seed) != seen.end()) return false;
        seen.push_back(st.seed);
        count[static_cast<std::size_t>(st.direction)] += 1;
    }
    for (int i = 0; i < s0.N; ++i)
        if (count[static_cast<std::size_t>(i)] != p.m[static_cast<std::size_t>(i)]) return false;
    return true;
}

std::vector<Step> canonical_order(const Partition& p, const NetState& s0) {
    std::vector<Step> order;
    std::size_t next = 0;
    for (int i = 0; i < s0.N; ++i)
        for (int c = 0; c < p.m[static_cast<std::size_t>(i)]; ++c)
            order.push_back({i, s0.seeds.at(next++).label});
    return order;
}

nlohmann::ordered_json order_json(const std::vector<Step>& order) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const Step& st : order) arr.push_back({{"direction", st.direction + 1}, {"seed", st.seed}});
    return arr;
}

int cmd_verify(const Options& opt) {
    NetConfig cfg = load_config_file(opt.config);
    NetState s0 = make_background(cfg.background);

    nlohmann::ordered_json doc;
    doc["config"] = opt.config;
    doc["mode"] = opt.mode;
    doc["rng_seed"] = opt.rng_seed;
    nlohmann::ordered_json sections;
    bool all = true;

    Report background = full_residual_suite(s0);
    all = all && background.all_pass();
    sections["background"] = background.to_json();
    std::cout << "background: " << background.checks.size() << " symbolic checks, " << background.failures()
              << " failures\n";

    if (!cfg.steps.empty()) {
        Report chain;
        NetState cur = s0;
        for (const Step& st : cfg.steps) {
            cur = levy_step(cur, st.direction, st.seed);
            chain.merge(full_residual_suite(cur));
        }
        all = all && chain.all_pass();
        sections["levy_chain"] = chain.to_json();
        std::cout << "levy chain: " << cfg.steps.size() << " steps, " << chain.checks.size() << " symbolic checks, "
                  << chain.failures() << " failures\n";
    }

    if (cfg.partition) {
        Partition p = Partition::of(*cfg.partition);
        TransformedNet net(s0, p);
        if (net.identically_singular())
            throw SingularError("the multi-Wronskian vanishes identically (degenerate seed family)");

        const bool exact = opt.mode == "exact";
        EvalMode mode = exact ? EvalMode::exact(sample_bases(s0.N, opt.rng_seed)) : EvalMode::floating();
        if (exact) doc["bases"] = bases_json(mode.bases);

        std::vector<Point> candidates = exact ? sample_rational_points(s0.N, 12, opt.rng_seed)
                                              : sample_float_points(s0.N, 40, opt.rng_seed);
        std::vector<Point> pts = filter_nonsingular(net, candidates, mode);
        const std::size_t want = exact ? 6 : 20;
        if (pts.size() > want) pts.resize(want);
        if (pts.empty()) throw SingularError("no nonsingular sample points for the closed form");

        Report closed = full_residual_suite(net, pts, mode);
        all = all && closed.all_pass();
        sections["closed_form"] = closed.to_json();
        std::cout << "closed form: " << pts.size() << " points, " << closed.checks.size() << " checks, "
                  << closed.failures() << " failures, max residual " << closed.max_residual() << "\n";

        Report bilinear;
        std::size_t n_bil_pts = std::min<std::size_t>(pts.size(), 3);
        for (int i = 0; i < s0.N; ++i)
            for (int k = 0; k < s0.N; ++k) {
                if (i == k) continue;
                if (p.total() <= 4) {
                    for (int l = 0; l < s0.P; ++l) {
                        CheckResult c;
                        c.name = "bilinear_X";
                        c.indices = {i + 1, k + 1, l + 1};
                        c.mode = "symbolic";
                        c.status = check_bilinear_X_symbolic(s0, p, i, k, l) ? "pass" : "fail";
                        bilinear.add(std::move(c));
                    }
                    CheckResult c;
                    c.name = "bilinear_H";
                    c.indices = {i + 1, k + 1};
                    c.mode = "symbolic";
                    c.status = check_bilinear_H_symbolic(s0, p, i, k) ? "pass" : "fail";
                    bilinear.add(std::move(c));
                }
                for (std::size_t pi = 0; pi < n_bil_pts; ++pi) {
                    for (int l = 0; l < s0.P; ++l) {
                        CheckResult c;
                        c.name = "bilinear_X";
                        c.indices = {i + 1, k + 1, l + 1};
                        c.point = pts[pi].f;
                        c.mode = "float";
                        c.residual = check_bilinear_X(s0, p, i, k, l, pts[pi]);
                        c.status = c.residual < 1e-7 ? "pass" : "fail";
                        bilinear.add(std::move(c));
                    }
                    CheckResult c;
                    c.name = "bilinear_H";
                    c.indices = {i + 1, k + 1};
                    c.point = pts[pi].f;
                    c.mode = "float";
                    c.residual = check_bilinear_H(s0, p, i, k, pts[pi]);
                    c.status = c.residual < 1e-7 ? "pass" : "fail";
                    bilinear.add(std::move(c));
                }
            }
        all = all && bilinear.all_pass();
        sections["bilinear"] = bilinear.to_json();
        std::cout << "bilinear identities: " << bilinear.checks.size() << " checks, " << bilinear.failures()
                  << " failures\n";

        std::vector<Step> order =
            order_matches(p, cfg.steps, s0) ? cfg.steps : canonical_order(p, s0);
        std::vector<Point> eq_pts = pts;
        const std::size_t eq_want = exact ? 4 : 10;
        if (eq_pts.size() > eq_want) eq_pts.resize(eq_want);
        EquivalenceOptions eo;
        eo.exact = exact;
        if (exact) eo.bases = mode.bases;
        EquivalenceReport eq = oracle_equivalence(s0, p, order, eq_pts, eo);
        all = all && eq.pass;
        nlohmann::ordered_json eq_doc;
        eq_doc["order"] = order_json(order);
        eq_doc["max_deviation"] = eq.max_deviation;
        eq_doc["first_divergence"] = eq.first_divergence;
        eq_doc["pass"] = eq.pass;
        eq_doc["report"] = eq.report.to_json();
        sections["equivalence"] = std::move(eq_doc);
        std::cout << "equivalence: " << eq_pts.size() << " points, max deviation " << eq.max_deviation
                  << (eq.pass ? " (pass)" : " (FAIL at " + eq.first_divergence + ")") << "\n";
    }

    doc["sections"] = std::move(sections);
    doc["all_pass"] = all;
    std::string out = opt.out.empty() ? "verify_report.json" : opt.out;
    write_text(out, doc.dump(2) + "\n");
    std::cout << (all ? "all checks passed" : "CHECKS FAILED") << "; report written to " << out << "\n";
    return all ? 0 : 1;
}

int cmd_surface(const Options& opt) {
    NetConfig cfg = load_config_file(opt.config);
    NetState s0 = make_background(cfg.background);
    std::vector<GridAxis> axes = parse_grid(opt.grid);
    if (static_cast<int>(axes.size()) != s0.N)
        throw DomainError("grid must give one axis per direction (" + std::to_string(s0.N) + " expected)");

    std::optional<TransformedNet> net;
    PointSampler sampler;
    if (cfg.partition) {
        net.emplace(s0, Partition::of(*cfg.partition));
        if (net->identically_singular())
            throw SingularError("the multi-Wronskian vanishes identically (degenerate seed family)");
        sampler = closed_form_sampler(*net);
    } else {
        sampler = background_sampler(s0);
    }

    const bool obj = opt.format == "obj";
    if (obj && (s0.N != 2 || s0.P != 3))
        throw DomainError("OBJ meshes need N=2, P=3; use --format csv");

    std::string out = opt.out.empty() ? (obj ? "surface.obj" : "surface.csv") : opt.out;
    std::ostringstream body;
    MeshStats st = obj ? write_obj(body, axes[0], axes[1], sampler) : write_csv(body, axes, sampler);
    if (st.empty()) throw SingularError("every grid node is singular");
    write_text(out, body.str());

    if (obj)
        std::cout << "wrote " << out << ": " << st.vertices << " vertices, " << st.faces << " triangles, "
                  << st.skipped << " singular nodes skipped\n";
    else
        std::cout << "wrote " << out << ": " << st.faces << " rows, " << st.skipped << " singular nodes skipped\n";
    return 0;
}

int cmd_transform(const Options& opt) {
    NetConfig cfg = load_config_file(opt.config);
    NetState cur = make_background(cfg.background);
    for (const Step& st : cfg.steps) cur = levy_step(cur, st.direction, st.seed);

    std::string out = opt.out.empty() ? "net_dump.json" : opt.out;
    write_text(out, dump_state(cur).dump(2) + "\n");
    std::cout << "applied " << cfg.steps.size() << " steps; state written to " << out << "\n";
    return 0;
}

} // namespace

int cli_main(std::vector<std::string> args) {
    CLI::App app{"conjugate net workbench: build zero-background nets, apply Levy transforms,\n"
                 "evaluate the Wronskian closed form, and verify the constructions"};
    app.require_subcommand(1);

    Options opt;
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("config", opt.config, "net configuration JSON")->required();
        sub->add_option("--mode", opt.mode, "evaluation mode")->check(CLI::IsMember({"float", "exact"}));
        sub->add_option("--rng-seed", opt.rng_seed, "seed for sample points (recorded in reports)");
        sub->add_option("--out", opt.out, "output path");
    };

    CLI::App* verify = app.add_subcommand("verify", "run residual, bilinear and equivalence checks");
    add_common(verify);
    CLI::App* surface = app.add_subcommand("surface", "sample the surface on a grid and export a mesh or table");
    add_common(surface);
    surface->add_option("--grid", opt.grid, "per-axis lo:hi:count, comma separated")->required();
    surface->add_option("--format", opt.format, "obj or csv")->check(CLI::IsMember({"obj", "csv"}));
    CLI::App* transform = app.add_subcommand("transform", "apply the configured steps and dump the state");
    add_common(transform);

    std::reverse(args.begin(), args.end());
    try {
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try {
        if (verify->parsed()) return cmd_verify(opt);
        if (surface->parsed()) return cmd_surface(opt);
        return cmd_transform(opt);
    } catch (const SingularError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const PoleError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
}

} // namespace conet

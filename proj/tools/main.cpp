#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <string>

#include "gmshape/io.hpp"
#include "gmshape/pipeline.hpp"

using namespace gmshape;

namespace {

int run(int argc, char** argv) {
    CLI::App app{"Gaussian mixture shape recovery from the distribution of squared distances"};
    app.require_subcommand(1);

    // gen
    auto* gen = app.add_subcommand("gen", "sample squared distances (or points) from a model");
    std::string gen_model, gen_out;
    std::int64_t gen_n = 0;
    std::uint64_t gen_seed = 0;
    bool gen_points = false;
    gen->add_option("--model", gen_model, "model JSON")->required();
    gen->add_option("--n", gen_n, "number of draws")->required()->check(CLI::PositiveNumber);
    gen->add_option("--seed", gen_seed, "RNG seed")->required();
    gen->add_option("--out", gen_out, "output CSV")->required();
    gen->add_flag("--points", gen_points, "emit point draws instead of deltas");

    // moments
    auto* mom = app.add_subcommand("moments", "empirical moments of deltas, or exact model moments");
    std::string mom_deltas, mom_model, mom_out;
    int mom_order = 0;
    bool mom_exact = false;
    mom->add_option("--deltas", mom_deltas, "delta CSV");
    mom->add_option("--model", mom_model, "model JSON");
    mom->add_flag("--exact", mom_exact, "compute exact moments from --model");
    mom->add_option("--max-order", mom_order, "highest moment order")->required()->check(CLI::NonNegativeNumber);
    mom->add_option("--out", mom_out, "output CSV")->required();

    // power-sums
    auto* ps = app.add_subcommand("power-sums", "convert moments to weighted power sums");
    std::string ps_moments, ps_out;
    int ps_d = 0;
    ps->add_option("--moments", ps_moments, "moment CSV")->required();
    ps->add_option("--d", ps_d, "ambient dimension")->required()->check(CLI::PositiveNumber);
    ps->add_option("--out", ps_out, "output CSV")->required();

    // recover
    auto* rec = app.add_subcommand("recover", "recover a mixture from power sums or delta samples");
    std::string rec_ps, rec_deltas, rec_out, rec_report;
    int rec_k = 0, rec_d = 0;
    rec->add_option("--power-sums", rec_ps, "power-sum CSV");
    rec->add_option("--deltas", rec_deltas, "delta CSV");
    rec->add_option("--k", rec_k, "component count")->required()->check(CLI::PositiveNumber);
    rec->add_option("--d", rec_d, "ambient dimension")->required()->check(CLI::PositiveNumber);
    rec->add_option("--out", rec_out, "recovered model JSON")->required();
    rec->add_option("--report", rec_report, "recovery report JSON");

    // compare
    auto* cmp = app.add_subcommand("compare", "compare two models up to rigid motion");
    std::string cmp_a, cmp_b;
    int cmp_order = 0;
    double cmp_tol = 1e-8;
    cmp->add_option("--a", cmp_a, "first model JSON")->required();
    cmp->add_option("--b", cmp_b, "second model JSON")->required();
    cmp->add_option("--max-order", cmp_order, "power-sum orders compared")->required()->check(CLI::PositiveNumber);
    cmp->add_option("--tol", cmp_tol, "equality tolerance");

    // hist
    auto* hist = app.add_subcommand("hist", "histogram a delta CSV");
    std::string hist_deltas, hist_out;
    int hist_bins = 0;
    hist->add_option("--deltas", hist_deltas, "delta CSV")->required();
    hist->add_option("--bins", hist_bins, "bin count")->required()->check(CLI::PositiveNumber);
    hist->add_option("--out", hist_out, "output CSV")->required();

    // estimate-k
    auto* est = app.add_subcommand("estimate-k", "Hankel-rank node-count estimate");
    std::string est_ps;
    est->add_option("--power-sums", est_ps, "power-sum CSV")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    if (gen->parsed()) {
        MixtureModel model = load_model(gen_model);
        if (gen_points) {
            const PointSample s = sample_points(model, gen_n, gen_seed);
            save_points(s.points, gen_out);
        } else {
            save_deltas(sample_deltas(model, gen_n, gen_seed), gen_out);
        }
        return 0;
    }

    if (mom->parsed()) {
        const bool from_deltas = !mom_deltas.empty();
        const bool from_model = !mom_model.empty() && mom_exact;
        if (from_deltas == from_model) {
            std::cerr << "moments: give either --deltas FILE or --model FILE --exact\n";
            return 2;
        }
        MomentVector m;
        if (from_deltas) {
            m = empirical_moments(load_deltas(mom_deltas), mom_order);
        } else {
            m = exact_moments(load_model(mom_model), mom_order);
        }
        save_moments(m, mom_out);
        return 0;
    }

    if (ps->parsed()) {
        MomentVector m = load_moments(ps_moments);
        m.d = ps_d;
        save_power_sums(moments_to_power_sums(m), ps_out);
        return 0;
    }

    if (rec->parsed()) {
        const bool from_ps = !rec_ps.empty();
        const bool from_deltas = !rec_deltas.empty();
        if (from_ps == from_deltas) {
            std::cerr << "recover: give either --power-sums FILE or --deltas FILE\n";
            return 2;
        }
        RecoveryReport report;
        if (from_ps) {
            report = recover_mixture(load_power_sums(rec_ps), rec_k, rec_d);
            report.input_hash = hash_file(rec_ps);
        } else {
            report = recover_mixture(load_deltas(rec_deltas), rec_k, rec_d);
            report.input_hash = hash_file(rec_deltas);
        }
        save_model(report.recovered, rec_out);
        if (!rec_report.empty()) save_report(report, rec_report);
        for (const std::string& w : report.warnings) std::cerr << "warning: " << w << "\n";
        std::cout << "power-sum residual " << format_g17(report.power_sum_residual)
                  << ", weight-sum defect " << format_g17(report.weight_sum_defect)
                  << ", zero-node defect " << format_g17(report.zero_node_defect) << "\n";
        return 0;
    }

    if (cmp->parsed()) {
        const MixtureModel a = load_model(cmp_a);
        const MixtureModel b = load_model(cmp_b);
        const ComparisonReport r = compare_models(a, b, cmp_order);
        std::cout << "power-sum discrepancy (orders 0.." << cmp_order
                  << "): " << format_g17(r.power_sum_discrepancy) << "\n";
        if (r.shape_compared)
            std::cout << "shape distance (weight-aware): " << format_g17(r.shape_dist) << "\n";
        else
            std::cout << "shape distance: not compared ("
                      << (r.structure_match ? "non-euclidean form" : "k/d/form mismatch")
                      << ")\n";
        const bool same = r.same_shape(cmp_tol);
        std::cout << (same ? "same shape" : "different") << " at tolerance "
                  << format_g17(cmp_tol) << "\n";
        return same ? 0 : 1;
    }

    if (hist->parsed()) {
        const DeltaSamples s = load_deltas(hist_deltas);
        save_histogram(histogram(s.values, hist_bins), hist_out);
        return 0;
    }

    if (est->parsed()) {
        const NodeCountEstimate e = estimate_node_count(load_power_sums(est_ps));
        std::cout << "estimated node count: " << e.K << "\n";
        std::cout << "scale: " << format_g17(e.scale) << "\n";
        std::cout << "singular values:";
        for (double sv : e.singular_values) std::cout << " " << format_g17(sv);
        std::cout << "\n";
        return 0;
    }

    return 2;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const Error& e) {
        if (e.tag() == "io") {
            std::cerr << "error: " << e.what() << "\n";
            return 2;
        }
        std::cerr << "error:";
        if (!e.stage().empty()) std::cerr << " stage=" << e.stage();
        std::cerr << " tag=" << e.tag() << ": " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
}

#pragma once

#include <algorithm>
#include <filesystem>
#include <functional>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "fext/config.hpp"
#include "fext/domain.hpp"
#include "fext/extrapolation.hpp"
#include "fext/family.hpp"
#include "fext/gram.hpp"
#include "fext/grid.hpp"
#include "fext/io.hpp"
#include "fext/multiplier.hpp"
#include "fext/multiresolution.hpp"
#include "fext/quadrature.hpp"
#include "fext/solver.hpp"

namespace fext {

struct ExperimentConfig {
    double alpha = 2.0;
    FrequencyDomain domain = FrequencyDomain::cube(1, 0.5);
    std::optional<FrequencyDomain> keep;  // verbatim-copy region for extrapolation
    FunctionFamily family = FunctionFamily(1, {ClosedForm{SincPower{2}, {}, 1.0}});
    SolverConfig solver;
    int tensor_resolution = 1024;  // fixed-rule path
    bool use_schedule = false;
    std::vector<std::string> pipeline;
    std::filesystem::path out_dir = "out";
    bool write_pgm = true;

    struct ExtrapolateParams {
        long member = 0;
        int grid_resolution = 64;
        long image_size = 64;
    } extrapolate;

    struct CascadeParams {
        int products = 128;
        int periodization_terms = 257;
        int boundary_window = 0;
        int rescale_p = 0;
        double grid_window = 8.0;
        long grid_points = 8193;
        long mask_resolution = 8192;
        long spatial_samples = 512;
        double spatial_window = 1.5;
    } cascade;

    struct GpParams {
        int steps = 200;
        long grid_points = 4096;
        double grid_window = 1.5;
        long member = 0;
        std::vector<double> q_lo{0.0};
        std::vector<double> q_hi{1.0};
    } gp;

    static ExperimentConfig load(const std::filesystem::path& path);
};

namespace detail {

inline FrequencyDomain domain_from_config(const ConfigFile& cfg, const std::string& section) {
    const std::string shape = cfg.get_string(section + ".shape");
    const int d = static_cast<int>(cfg.get_int(section + ".dimension", 1));
    if (shape == "cube") return FrequencyDomain::cube(d, cfg.get_double(section + ".half_width"));
    if (shape == "ball") return FrequencyDomain::ball(d, cfg.get_double(section + ".radius"));
    if (shape == "annulus")
        return FrequencyDomain::annulus(d, cfg.get_double(section + ".r_min"), cfg.get_double(section + ".r_max"));
    if (shape == "sector_pair")
        return FrequencyDomain::sector_pair(cfg.get_double_array(section + ".axis"),
                                            cfg.get_double(section + ".cos_half_angle"),
                                            cfg.get_double(section + ".r_min"),
                                            cfg.get_double(section + ".r_max"));
    throw std::runtime_error("config: unknown domain shape '" + shape + "'");
}

inline FunctionFamily family_from_config(const ConfigFile& cfg, const std::filesystem::path& base_dir,
                                         double alpha, int dimension) {
    const std::string kind = cfg.get_string("family.kind", "closed_form");
    if (kind == "idx") {
        auto resolve = [&](const std::string& p) {
            std::filesystem::path fp(p);
            if (fp.is_relative()) fp = base_dir / fp;
            if (!std::filesystem::exists(fp))
                throw std::runtime_error("config: referenced path does not exist: " + fp.string());
            return fp;
        };
        const auto images = resolve(cfg.get_string("family.images"));
        const auto labels = resolve(cfg.get_string("family.labels"));
        const int digit = static_cast<int>(cfg.get_int("family.digit"));
        const int count = static_cast<int>(cfg.get_int("family.count"));
        long rows = 0, cols = 0;
        const auto grids = io::load_idx_images(images, labels, digit, count, &rows, &cols);
        std::vector<MemberSpec> members;
        members.reserve(grids.size());
        for (const auto& g : grids) {
            DiscreteInterpolant di;
            di.shape = {static_cast<int>(rows), static_cast<int>(cols)};
            di.coeffs.assign(g.begin(), g.end());
            di.dx = 1.0 / static_cast<double>(rows);
            members.push_back(std::move(di));
        }
        return FunctionFamily(2, std::move(members));
    }
    if (kind != "closed_form") throw std::runtime_error("config: unknown family kind '" + kind + "'");

    const std::string base_kind = cfg.get_string("family.base", "sinc_power");
    ClosedForm base;
    if (base_kind == "sinc_power") {
        base.kind = SincPower{static_cast<int>(cfg.get_int("family.power", 2))};
    } else if (base_kind == "indicator_box") {
        base.kind = IndicatorBoxTransform{cfg.get_double_array("family.shift", std::vector<double>(
                                                                                   static_cast<std::size_t>(dimension), 0.0))};
    } else {
        throw std::runtime_error("config: unknown family base '" + base_kind + "'");
    }
    if (cfg.has("family.modulation")) base.modulation = cfg.get_double_array("family.modulation");

    const std::string construction = cfg.get_string("family.construction", "single");
    if (construction == "single") return FunctionFamily(dimension, {base});
    if (construction == "translates") {
        const std::vector<double> flat = cfg.get_double_array("family.offsets");
        if (flat.size() % static_cast<std::size_t>(dimension) != 0)
            throw std::runtime_error("config: family.offsets length must be a multiple of the dimension");
        std::vector<std::vector<double>> offsets;
        for (std::size_t i = 0; i < flat.size(); i += static_cast<std::size_t>(dimension))
            offsets.emplace_back(flat.begin() + static_cast<std::ptrdiff_t>(i),
                                 flat.begin() + static_cast<std::ptrdiff_t>(i + static_cast<std::size_t>(dimension)));
        return make_translates(base, offsets);
    }
    if (construction == "scalings") {
        const int count = static_cast<int>(cfg.get_int("family.count"));
        const double scale_alpha = cfg.get_double("family.scale_alpha", alpha);
        return make_scalings(base, scale_alpha, count);
    }
    throw std::runtime_error("config: unknown family construction '" + construction + "'");
}

}  // namespace detail

inline ExperimentConfig ExperimentConfig::load(const std::filesystem::path& path) {
    const ConfigFile cfg = ConfigFile::load(path);
    const std::filesystem::path base_dir = path.has_parent_path() ? path.parent_path() : ".";

    ExperimentConfig ec;
    ec.alpha = cfg.get_double("alpha", 2.0);
    ec.domain = detail::domain_from_config(cfg, "domain");
    if (cfg.has("keep.shape")) ec.keep = detail::domain_from_config(cfg, "keep");
    ec.family = detail::family_from_config(cfg, base_dir, ec.alpha, ec.domain.dimension());
    if (ec.family.dimension() != ec.domain.dimension())
        throw std::runtime_error("config: family and domain dimensions disagree");

    ec.solver.delta = cfg.get_double("solver.delta", 1e-6);
    ec.solver.tau_g = cfg.get_double("solver.tau_g", 0.25);
    ec.solver.tau_sigma = cfg.get_double("solver.tau_sigma", 0.50);
    ec.solver.iterations = static_cast<int>(cfg.get_int("solver.iterations", 100));
    ec.solver.seed = static_cast<std::uint64_t>(cfg.get_int("solver.seed", 0));
    const std::string w_kind = cfg.get_string("solver.w_kind", "nuclear_ball");
    const double w_radius = cfg.get_double("solver.w_radius", 1.0);
    if (w_kind == "nuclear_ball") ec.solver.W = SpectralSet::nuclear_ball(w_radius);
    else if (w_kind == "operator_ball") ec.solver.W = SpectralSet::operator_ball(w_radius);
    else if (w_kind == "trace_cap") ec.solver.W = SpectralSet::trace_cap(w_radius);
    else throw std::runtime_error("config: unknown W kind '" + w_kind + "'");

    const std::string rule = cfg.get_string("solver.rule", "tensor");
    if (rule == "monte_carlo") {
        NodeSchedule schedule;
        schedule.min_nodes = static_cast<int>(cfg.get_int("solver.schedule_min", 1000));
        schedule.max_nodes = static_cast<int>(cfg.get_int("solver.schedule_max", 100000));
        const std::string growth = cfg.get_string("solver.schedule_growth", "geometric");
        schedule.growth = growth == "linear" ? NodeSchedule::Growth::linear : NodeSchedule::Growth::geometric;
        schedule.factor = cfg.get_double("solver.schedule_factor", 0.0);
        ec.solver.schedule = schedule;
        ec.use_schedule = true;
    } else if (rule == "tensor") {
        ec.tensor_resolution = static_cast<int>(cfg.get_int("solver.tensor_resolution", 1024));
    } else {
        throw std::runtime_error("config: unknown solver rule '" + rule + "'");
    }

    ec.pipeline = cfg.get_string_array("pipeline", {"solve"});
    ec.out_dir = cfg.get_string("output.directory", "out");
    if (std::filesystem::path(ec.out_dir).is_relative()) ec.out_dir = base_dir / ec.out_dir;
    const auto formats = cfg.get_string_array("output.formats", {"csv", "pgm"});
    ec.write_pgm = std::find(formats.begin(), formats.end(), "pgm") != formats.end();

    ec.extrapolate.member = cfg.get_int("extrapolate.member", 0);
    ec.extrapolate.grid_resolution = static_cast<int>(cfg.get_int("extrapolate.grid_resolution", 64));
    ec.extrapolate.image_size = cfg.get_int("extrapolate.image_size", 64);

    ec.cascade.products = static_cast<int>(cfg.get_int("cascade.products", 128));
    ec.cascade.periodization_terms = static_cast<int>(cfg.get_int("cascade.periodization_terms", 257));
    ec.cascade.boundary_window = static_cast<int>(cfg.get_int("cascade.boundary_window", 0));
    ec.cascade.rescale_p = static_cast<int>(cfg.get_int("cascade.rescale_p", 0));
    ec.cascade.grid_window = cfg.get_double("cascade.grid_window", 8.0);
    ec.cascade.grid_points = cfg.get_int("cascade.grid_points", 8193);
    ec.cascade.mask_resolution = cfg.get_int("cascade.mask_resolution", 8192);
    ec.cascade.spatial_samples = cfg.get_int("cascade.spatial_samples", 512);
    ec.cascade.spatial_window = cfg.get_double("cascade.spatial_window", 1.5);

    ec.gp.steps = static_cast<int>(cfg.get_int("gp.steps", 200));
    ec.gp.grid_points = cfg.get_int("gp.grid_points", 4096);
    ec.gp.grid_window = cfg.get_double("gp.grid_window", 1.5);
    ec.gp.member = cfg.get_int("gp.member", 0);
    const int d = ec.domain.dimension();
    ec.gp.q_lo = cfg.get_double_array("gp.q_lo", std::vector<double>(static_cast<std::size_t>(d), 0.0));
    ec.gp.q_hi = cfg.get_double_array("gp.q_hi", std::vector<double>(static_cast<std::size_t>(d), 1.0));
    return ec;
}

namespace detail {

/// Writes artifacts as <name>.partial, renaming on completion, so an aborted
/// stage leaves its unfinished outputs marked.
class ArtifactSink {
public:
    explicit ArtifactSink(std::filesystem::path dir) : dir_(std::move(dir)) {
        std::filesystem::create_directories(dir_);
    }

    template <class Writer>
    void write(const std::string& name, Writer&& writer) {
        const std::filesystem::path partial = dir_ / (name + ".partial");
        writer(partial);
        std::filesystem::rename(partial, dir_ / name);
        manifest_.add(dir_, name);
    }

    const io::Manifest& manifest() const { return manifest_; }
    const std::filesystem::path& dir() const { return dir_; }

    void finalize() const { manifest_.write(dir_ / "manifest.txt"); }

private:
    std::filesystem::path dir_;
    io::Manifest manifest_;
};

inline GridField sample_member_field(const FunctionFamily& family, long member, const GridField& grid_spec) {
    if (member < 0 || member >= family.size()) throw std::invalid_argument("member index out of range");
    auto fn = [family, member](std::span<const double> xi) { return family.eval(xi)(member); };
    return sample_on_grid(grid_spec, fn);
}

inline GridField omega_grid(const FrequencyDomain& domain, const std::optional<FrequencyDomain>& keep,
                            int resolution) {
    auto [lo, hi] = bounding_box(domain);
    if (keep) {
        const auto [lok, hik] = bounding_box(*keep);
        for (std::size_t a = 0; a < lo.size(); ++a) {
            lo[a] = std::min(lo[a], lok[a]);
            hi[a] = std::max(hi[a], hik[a]);
        }
    }
    const int d = domain.dimension();
    std::vector<long> shape(static_cast<std::size_t>(d), resolution);
    std::vector<double> spacing(static_cast<std::size_t>(d));
    std::vector<double> origin(static_cast<std::size_t>(d));
    for (int a = 0; a < d; ++a) {
        spacing[static_cast<std::size_t>(a)] = (hi[static_cast<std::size_t>(a)] - lo[static_cast<std::size_t>(a)]) / resolution;
        origin[static_cast<std::size_t>(a)] = lo[static_cast<std::size_t>(a)] + 0.5 * spacing[static_cast<std::size_t>(a)];
    }
    return make_grid(shape, spacing, origin);
}

inline void write_image_pgm(ArtifactSink& sink, const std::string& name, const GridField& image) {
    if (image.d != 2) return;
    std::vector<double> real(image.size());
    double lo = image.values.empty() ? 0.0 : image.values[0].real();
    double hi = lo;
    for (std::size_t i = 0; i < image.size(); ++i) {
        real[i] = image.values[i].real();
        lo = std::min(lo, real[i]);
        hi = std::max(hi, real[i]);
    }
    if (!(hi > lo)) hi = lo + 1.0;
    sink.write(name, [&](const std::filesystem::path& p) {
        io::write_pgm(p, real, image.shape[0], image.shape[1], lo, hi, 255);
    });
}

}  // namespace detail

/// Executes the requested pipeline stages in order and returns the manifest of
/// produced artifacts. Deterministic given (config, seed).
inline io::Manifest run_experiment(const ExperimentConfig& config,
                                   std::optional<std::uint64_t> seed_override = std::nullopt,
                                   std::optional<std::filesystem::path> out_override = std::nullopt) {
    ExperimentConfig cfg = config;
    if (seed_override) cfg.solver.seed = *seed_override;
    if (out_override) cfg.out_dir = *out_override;
    if (!cfg.use_schedule) {
        cfg.solver.schedule.reset();
        cfg.solver.fixed_rule = tensor_rule(cfg.domain, cfg.tensor_resolution);
    }

    detail::ArtifactSink sink(cfg.out_dir);
    std::optional<SolveResult> solved;

    auto multiplier_or_identity = [&]() -> SigmaMultiplier {
        if (solved) return solved->multiplier;
        return SigmaMultiplier(cfg.family, cfg.alpha, HermitianMatrix::identity(cfg.family.size()), 0.0,
                               cfg.domain);
    };

    auto run_stage = [&](const std::string& name, const std::function<void()>& body) {
        try {
            body();
        } catch (const std::exception& e) {
            throw std::runtime_error("stage '" + name + "' failed: " + e.what());
        }
    };

    for (const std::string& raw_stage : cfg.pipeline) {
        std::string stage = raw_stage;
        std::replace(stage.begin(), stage.end(), '-', '_');

        if (stage == "solve") {
            run_stage(stage, [&] {
                solved = solve(cfg.family, cfg.alpha, cfg.domain, cfg.solver);
                sink.write("sigma.csv", [&](const std::filesystem::path& p) {
                    io::write_matrix_csv(p, solved->sigma);
                });
                sink.write("trace.csv", [&](const std::filesystem::path& p) {
                    io::write_trace_csv(p, solved->trace);
                });
                const GridField panel = sample_on_grid(
                    detail::omega_grid(cfg.domain, std::nullopt, cfg.extrapolate.grid_resolution),
                    [&](std::span<const double> xi) {
                        return contains(cfg.domain, xi) ? solved->multiplier.eval(xi)
                                                        : std::complex<double>(0.0, 0.0);
                    });
                sink.write("multiplier.csv", [&](const std::filesystem::path& p) {
                    io::write_field_csv(p, panel);
                });
                if (cfg.write_pgm && panel.d == 2) {
                    GridField magnitude = panel;
                    GridField phase = panel;
                    for (std::size_t i = 0; i < panel.size(); ++i) {
                        magnitude.values[i] = std::abs(panel.values[i]);
                        phase.values[i] = std::arg(panel.values[i]);
                    }
                    detail::write_image_pgm(sink, "multiplier_magnitude.pgm", magnitude);
                    detail::write_image_pgm(sink, "multiplier_phase.pgm", phase);
                }
            });
        } else if (stage == "extrapolate") {
            run_stage(stage, [&] {
                const SigmaMultiplier m = multiplier_or_identity();
                const GridField low = detail::sample_member_field(
                    cfg.family, cfg.extrapolate.member,
                    detail::omega_grid(cfg.domain, cfg.keep, cfg.extrapolate.grid_resolution));
                const GridField ext = extrapolate_field(m, low, cfg.alpha, cfg.domain, cfg.keep);
                GridField truth = ext;
                truth.exact = nullptr;
                {
                    std::vector<double> xi;
                    for (std::size_t i = 0; i < truth.size(); ++i) {
                        truth.coord(i, xi);
                        truth.values[i] = low.exact(xi);
                    }
                }
                sink.write("low.csv", [&](const std::filesystem::path& p) { io::write_field_csv(p, low); });
                sink.write("extrapolated.csv",
                           [&](const std::filesystem::path& p) { io::write_field_csv(p, ext); });
                sink.write("truth.csv", [&](const std::filesystem::path& p) { io::write_field_csv(p, truth); });
                const FrequencyDomain band = dilate(cfg.domain, cfg.alpha);
                sink.write("error.csv", [&](const std::filesystem::path& p) {
                    io::CsvWriter csv(p, {"region", "relative_l2_error"});
                    csv.row({"omega0", io::format_double(extrapolation_error(ext, truth, cfg.domain))});
                    csv.row({"alpha_omega0", io::format_double(extrapolation_error(ext, truth, band))});
                });
                if (cfg.family.dimension() == 2) {
                    const std::vector<long> img_shape{cfg.extrapolate.image_size, cfg.extrapolate.image_size};
                    const GridField low_img = reconstruct_space(low, img_shape);
                    const GridField ext_img = reconstruct_space(ext, img_shape);
                    const GridField truth_img = reconstruct_space(truth, img_shape);
                    sink.write("low_image.csv",
                               [&](const std::filesystem::path& p) { io::write_field_csv(p, low_img, "spatial"); });
                    sink.write("extrapolated_image.csv",
                               [&](const std::filesystem::path& p) { io::write_field_csv(p, ext_img, "spatial"); });
                    if (cfg.write_pgm) {
                        detail::write_image_pgm(sink, "low_image.pgm", low_img);
                        detail::write_image_pgm(sink, "extrapolated_image.pgm", ext_img);
                        detail::write_image_pgm(sink, "truth_image.pgm", truth_img);
                    }
                }
            });
        } else if (stage == "cascade") {
            run_stage(stage, [&] {
                if (cfg.domain.dimension() != 1)
                    throw std::runtime_error("cascade stage supports d = 1 only");
                const SigmaMultiplier m = multiplier_or_identity();
                FreqMap mask_map = freq_map_from_multiplier(m);
                mask_map = apply_boundary_window(std::move(mask_map), cfg.cascade.boundary_window);
                mask_map = rescale_mask(std::move(mask_map), cfg.cascade.rescale_p);
                // sample-backed mask keeps the J-fold product affordable
                const PeriodicMask mask =
                    periodize_mask(mask_map, 1, cfg.cascade.mask_resolution, /*keep_exact=*/false);

                const CascadeResult casc =
                    cascade(mask, cfg.cascade.products, make_grid_1d(cfg.cascade.grid_window, cfg.cascade.grid_points));
                const PeriodicMask big_phi =
                    periodization_Phi(casc, cfg.cascade.periodization_terms, cfg.cascade.mask_resolution);
                const PeriodicMask g = wavelet_mask(mask, big_phi);
                const GridField psi_hat = wavelet_hat(g, casc);

                const std::vector<long> spatial_shape{cfg.cascade.spatial_samples};
                const std::vector<double> lo{-cfg.cascade.spatial_window};
                const std::vector<double> hi{cfg.cascade.spatial_window};
                const GridField phi = reconstruct_space(casc.grid, spatial_shape, lo, hi);
                const GridField psi = reconstruct_space(psi_hat, spatial_shape, lo, hi);

                // one period of the mask and of Phi, one row per sample
                auto write_mask = [&](const std::string& name, const PeriodicMask& pm) {
                    sink.write(name, [&](const std::filesystem::path& p) {
                        io::CsvWriter csv(p, {"xi [cycles]", "re", "im"});
                        for (long j = 0; j < pm.resolution(); ++j) {
                            const double xi = -0.5 + static_cast<double>(j) / static_cast<double>(pm.resolution());
                            const std::complex<double> v = pm.samples()[static_cast<std::size_t>(j)];
                            csv.row_values({xi, v.real(), v.imag()});
                        }
                    });
                };
                auto plot_panel = [&](const std::string& name, const std::vector<std::complex<double>>& values) {
                    if (!cfg.write_pgm) return;
                    std::vector<double> real(values.size());
                    for (std::size_t i = 0; i < values.size(); ++i) real[i] = values[i].real();
                    sink.write(name, [&](const std::filesystem::path& p) { io::write_line_plot_pgm(p, real); });
                };

                sink.write("family.csv", [&](const std::filesystem::path& p) {
                    std::vector<std::string> header{"xi [cycles]"};
                    for (int i = 0; i < cfg.family.size(); ++i) {
                        header.push_back("re_" + std::to_string(i));
                        header.push_back("im_" + std::to_string(i));
                    }
                    io::CsvWriter csv(p, header);
                    const long samples = 512;
                    for (long j = 0; j <= samples; ++j) {
                        const double xi = -0.5 + static_cast<double>(j) / static_cast<double>(samples);
                        const Eigen::VectorXcd v = cfg.family.eval(std::vector<double>{xi});
                        std::vector<double> row{xi};
                        for (int i = 0; i < v.size(); ++i) {
                            row.push_back(v(i).real());
                            row.push_back(v(i).imag());
                        }
                        csv.row_values(row);
                    }
                });
                write_mask("mask.csv", mask);
                sink.write("phi_hat.csv", [&](const std::filesystem::path& p) { io::write_field_csv(p, casc.grid); });
                sink.write("phi.csv", [&](const std::filesystem::path& p) { io::write_field_csv(p, phi, "spatial"); });
                write_mask("periodization.csv", big_phi);
                write_mask("wavelet_mask.csv", g);
                sink.write("psi_hat.csv", [&](const std::filesystem::path& p) { io::write_field_csv(p, psi_hat); });
                sink.write("psi.csv", [&](const std::filesystem::path& p) { io::write_field_csv(p, psi, "spatial"); });
                plot_panel("mask.pgm", mask.samples());
                plot_panel("phi_hat.pgm", casc.grid.values);
                plot_panel("phi.pgm", phi.values);
                plot_panel("periodization.pgm", big_phi.samples());
                plot_panel("wavelet_mask.pgm", g.samples());
                plot_panel("psi_hat.pgm", psi_hat.values);
                plot_panel("psi.pgm", psi.values);
            });
        } else if (stage == "gp_baseline" || stage == "baseline_gp") {
            run_stage(stage, [&] {
                const int d = cfg.domain.dimension();
                std::vector<long> shape(static_cast<std::size_t>(d), cfg.gp.grid_points);
                std::vector<double> spacing(static_cast<std::size_t>(d),
                                            2.0 * cfg.gp.grid_window / static_cast<double>(cfg.gp.grid_points));
                std::vector<double> origin(static_cast<std::size_t>(d));
                for (int a = 0; a < d; ++a)
                    origin[static_cast<std::size_t>(a)] = -cfg.gp.grid_window + 0.5 * spacing[static_cast<std::size_t>(a)];
                const GridField data = detail::sample_member_field(cfg.family, cfg.gp.member,
                                                                   make_grid(shape, spacing, origin));
                const GpResult gp = gp_iterate(data, cfg.domain, cfg.gp.q_lo, cfg.gp.q_hi, cfg.gp.steps);
                sink.write("gp_residuals.csv", [&](const std::filesystem::path& p) {
                    io::CsvWriter csv(p, {"step", "omega0_relative_residual"});
                    for (std::size_t k = 0; k < gp.residuals.size(); ++k)
                        csv.row({std::to_string(k + 1), io::format_double(gp.residuals[k])});
                });
                sink.write("gp_field.csv", [&](const std::filesystem::path& p) { io::write_field_csv(p, gp.field); });
            });
        } else if (stage == "export_filter") {
            run_stage(stage, [&] {
                const SigmaMultiplier m = multiplier_or_identity();
                const int d = cfg.domain.dimension();
                const std::vector<long> img_shape(static_cast<std::size_t>(d), cfg.extrapolate.image_size);
                const std::vector<double> lo(static_cast<std::size_t>(d), -0.5);
                const std::vector<double> hi(static_cast<std::size_t>(d), 0.5);
                const GridField filter =
                    spatial_filter(m, cfg.domain, cfg.alpha, cfg.extrapolate.grid_resolution, img_shape, lo, hi);
                sink.write("filter.csv", [&](const std::filesystem::path& p) { io::write_field_csv(p, filter, "spatial"); });
                if (cfg.write_pgm) detail::write_image_pgm(sink, "filter.pgm", filter);
            });
        } else {
            throw std::runtime_error("run_experiment: unknown pipeline stage '" + raw_stage + "'");
        }
    }

    sink.finalize();
    return sink.manifest();
}

}  // namespace fext

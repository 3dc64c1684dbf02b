// command-line front end: solve / transform / analyze / render, composing
// through files only

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "sandpile/analysis.hpp"
#include "sandpile/field_io.hpp"
#include "sandpile/json_io.hpp"
#include "sandpile/render.hpp"

using namespace sandpile;

namespace {

constexpr const char* kVersion = "0.1.0";

struct Manifest {
    std::string cmd;
    std::vector<std::string> inputs;
    Json outputs = Json::array();

    void add_output(const std::string& path, const std::vector<std::uint8_t>& bytes) {
        outputs.push_back({{"path", path}, {"bytes", bytes.size()}, {"fnv64", fnv1a64_hex(bytes)}});
    }
    void print() const {
        Json j{{"tool", "sandpile"}, {"version", kVersion}, {"cmd", cmd}, {"inputs", inputs},
               {"outputs", outputs}};
        std::cout << j.dump() << "\n";
    }
};

void write_output(Manifest& man, const std::string& path, const std::vector<std::uint8_t>& bytes) {
    write_file_atomic(path, bytes);
    man.add_output(path, bytes);
}

void write_output(Manifest& man, const std::string& path, const std::string& text) {
    write_output(man, path, std::vector<std::uint8_t>(text.begin(), text.end()));
}

ShapeSpec parse_shape(const std::string& s) {
    if (s == "unit-square") return ShapeSpec::unit_square();
    if (s == "square2") return ShapeSpec::square2();
    if (s.rfind("polygon:", 0) == 0) {
        std::string path = s.substr(8);
        auto bytes = read_file(path);
        Json j = Json::parse(bytes.begin(), bytes.end());
        std::vector<RatPoint> verts;
        for (const auto& v : j)
            verts.push_back({rat_from_string(v.at(0).get<std::string>()),
                             rat_from_string(v.at(1).get<std::string>())});
        return ShapeSpec::polygon(std::move(verts));
    }
    throw std::domain_error("unknown shape '" + s + "'");
}

std::vector<std::int64_t> parse_int_list(const std::string& s) {
    std::vector<std::int64_t> out;
    std::size_t pos = 0;
    while (pos < s.size()) {
        std::size_t comma = s.find(',', pos);
        if (comma == std::string::npos) comma = s.size();
        out.push_back(std::stoll(s.substr(pos, comma - pos)));
        pos = comma + 1;
    }
    if (out.empty()) throw std::domain_error("empty integer list");
    return out;
}

Window parse_window(const std::string& s) {
    auto v = parse_int_list(s);
    if (v.size() != 4) throw std::domain_error("window must be x0,y0,width,height");
    return Window(v[0], v[1], v[2], v[3]);
}

Region region_from_flags(const std::string& rect, const std::string& mask_path,
                         const IntField& image, std::int64_t erode) {
    std::vector<LatticePoint> cells;
    if (!rect.empty()) {
        Window w = parse_window(rect);
        for (std::int64_t y = w.y0; y < w.y0 + w.height; ++y)
            for (std::int64_t x = w.x0; x < w.x0 + w.width; ++x) cells.push_back({x, y});
    } else if (!mask_path.empty()) {
        IntField m = read_igf1(mask_path);
        const Window& w = m.window();
        for (std::int64_t y = w.y0; y < w.y0 + w.height; ++y)
            for (std::int64_t x = w.x0; x < w.x0 + w.width; ++x)
                if (m.at({x, y}) != 0) cells.push_back({x, y});
    } else {
        const Window& w = image.window();
        for (std::int64_t y = w.y0; y < w.y0 + w.height; ++y)
            for (std::int64_t x = w.x0; x < w.x0 + w.width; ++x) cells.push_back({x, y});
    }
    return Region::from_cells(std::move(cells), erode);
}

int run(int argc, char** argv) {
    CLI::App app{"integer least-action sandpile toolkit"};
    app.require_subcommand(1);
    int threads = 1;
    app.add_option("--threads", threads, "worker threads (output is thread-invariant)");

    // solve
    auto* solve = app.add_subcommand("solve", "compute the least solution on a scaled shape");
    std::string solve_shape = "unit-square", solve_out, solve_stats;
    std::int64_t solve_n = 1, solve_cutoff = 2;
    solve->add_option("--shape", solve_shape);
    solve->add_option("--n", solve_n)->required();
    solve->add_option("--cutoff", solve_cutoff);
    solve->add_option("--out", solve_out)->required();
    solve->add_option("--stats", solve_stats);

    // laplacian
    auto* lap = app.add_subcommand("laplacian", "pointwise five-point laplacian of a field");
    std::string lap_in, lap_out, lap_window;
    lap->add_option("--in", lap_in)->required();
    lap->add_option("--out", lap_out)->required();
    lap->add_option("--window", lap_window, "x0,y0,width,height (default: input window)");

    // shift
    auto* shift = app.add_subcommand("shift", "add alpha * x1(x1+1)/2 to a field");
    std::string shift_in, shift_out;
    std::int64_t shift_alpha = 0;
    shift->add_option("--in", shift_in)->required();
    shift->add_option("--alpha", shift_alpha)->required();
    shift->add_option("--out", shift_out)->required();

    // continuum
    auto* cont = app.add_subcommand("continuum", "sample the continuum field at scale n");
    int cont_depth = 8;
    std::int64_t cont_n = 1;
    std::string cont_out, cont_window;
    cont->add_option("--depth", cont_depth);
    cont->add_option("--n", cont_n)->required();
    cont->add_option("--out", cont_out)->required();
    cont->add_option("--window", cont_window);

    // pieces
    auto* pc = app.add_subcommand("pieces", "emit the quadratic pieces as JSON");
    int pc_depth = 6;
    std::string pc_out, pc_decay_out;
    pc->add_option("--depth", pc_depth);
    pc->add_option("--out", pc_out)->required();
    pc->add_option("--decay-out", pc_decay_out, "also write the exact area accounting");

    // match
    auto* match = app.add_subcommand("match", "fraction of points where a pattern matches");
    std::string match_image, match_pattern, match_out, match_rect, match_mask;
    std::int64_t match_r = 3, match_erode = 0;
    match->add_option("--image", match_image)->required();
    match->add_option("--pattern", match_pattern)->required();
    match->add_option("--r", match_r);
    match->add_option("--out", match_out)->required();
    match->add_option("--region-rect", match_rect);
    match->add_option("--region-mask", match_mask);
    match->add_option("--erode", match_erode);

    // detect-period
    auto* dp = app.add_subcommand("detect-period", "extract a periodic pattern from a field");
    std::string dp_in, dp_out, dp_rect, dp_mask;
    std::int64_t dp_bound = 12, dp_erode = 0;
    dp->add_option("--in", dp_in)->required();
    dp->add_option("--bound", dp_bound);
    dp->add_option("--out", dp_out)->required();
    dp->add_option("--region-rect", dp_rect);
    dp->add_option("--region-mask", dp_mask);
    dp->add_option("--erode", dp_erode);

    // analyze-convergence
    auto* ac = app.add_subcommand("analyze-convergence", "scaling-limit error ladder");
    std::string ac_ns = "27,81,243", ac_out, ac_shape = "unit-square";
    int ac_depth = 8;
    ac->add_option("--ns", ac_ns);
    ac->add_option("--depth", ac_depth);
    ac->add_option("--shape", ac_shape);
    ac->add_option("--out", ac_out)->required();

    // analyze-defects
    auto* ad = app.add_subcommand("analyze-defects", "pattern match fractions inside patches");
    std::string ad_rs = "2,3,5,8", ad_out;
    std::int64_t ad_n = 243;
    int ad_depth = 8, ad_kmax = 3;
    ad->add_option("--n", ad_n);
    ad->add_option("--depth", ad_depth);
    ad->add_option("--r", ad_rs);
    ad->add_option("--kmax", ad_kmax);
    ad->add_option("--out", ad_out)->required();

    // analyze-perfect
    auto* ap = app.add_subcommand("analyze-perfect", "per-patch defect counts at powers of three");
    std::string ap_ms = "3,4,5", ap_contrast = "200", ap_out;
    std::int64_t ap_min_patch = 25;
    ap->add_option("--ms", ap_ms);
    ap->add_option("--contrast", ap_contrast, "extra non-power scales for comparison");
    ap->add_option("--min-patch", ap_min_patch);
    ap->add_option("--out", ap_out)->required();

    // render
    auto* rd = app.add_subcommand("render", "raster a field (or the piece diagram) to PPM/PGM");
    std::string rd_in, rd_out, rd_palette = "sandpile";
    int rd_pieces_depth = -1, rd_resolution = 729;
    rd->add_option("--in", rd_in);
    rd->add_option("--out", rd_out)->required();
    rd->add_option("--palette", rd_palette)->check(CLI::IsMember({"sandpile", "gray"}));
    rd->add_option("--pieces-depth", rd_pieces_depth, "render the piece diagram instead");
    rd->add_option("--resolution", rd_resolution);

    // experiments
    auto* ex = app.add_subcommand("experiments", "run the full battery and write a manifest");
    std::string ex_dir = "experiments";
    int ex_depth = 8;
    std::string ex_ns = "27,81,243", ex_ms = "3,4,5";
    std::int64_t ex_ndefect = 243;
    ex->add_option("--outdir", ex_dir);
    ex->add_option("--depth", ex_depth);
    ex->add_option("--ns", ex_ns);
    ex->add_option("--ms", ex_ms);
    ex->add_option("--n-defect", ex_ndefect);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 2;  // flag mistakes are domain errors
    }

    Manifest man;

    if (*solve) {
        man.cmd = "solve";
        Solution s = solve_least(build_mask(parse_shape(solve_shape), solve_n), solve_cutoff, threads);
        write_output(man, solve_out, encode_igf1(s.u));
        if (!solve_stats.empty()) write_output(man, solve_stats, dump_json(stats_to_json(s)));
    } else if (*lap) {
        man.cmd = "laplacian";
        man.inputs.push_back(lap_in);
        IntField f = read_igf1(lap_in);
        Window w = lap_window.empty() ? f.window() : parse_window(lap_window);
        write_output(man, lap_out, encode_igf1(laplacian_field(f, w)));
    } else if (*shift) {
        man.cmd = "shift";
        man.inputs.push_back(shift_in);
        write_output(man, shift_out, encode_igf1(shift_cutoff(read_igf1(shift_in), shift_alpha)));
    } else if (*cont) {
        man.cmd = "continuum";
        SuperSolution ss = ifs_generate(cont_depth);
        Window w = cont_window.empty()
                       ? Window(-cont_n - 1, -cont_n - 1, 2 * cont_n + 3, 2 * cont_n + 3)
                       : parse_window(cont_window);
        write_output(man, cont_out, encode_fgf1(ss.sample_field(cont_n, w, threads)));
    } else if (*pc) {
        man.cmd = "pieces";
        SuperSolution ss = ifs_generate(pc_depth);
        write_output(man, pc_out, dump_json(pieces_to_json(pieces(ss))));
        if (!pc_decay_out.empty())
            write_output(man, pc_decay_out, dump_json(decay_to_json(patch_measure_decay(ss))));
    } else if (*match) {
        man.cmd = "match";
        man.inputs = {match_image, match_pattern};
        IntField img = read_igf1(match_image);
        auto pbytes = read_file(match_pattern);
        PeriodicPattern pat = pattern_from_json(Json::parse(pbytes.begin(), pbytes.end()));
        Region region = region_from_flags(match_rect, match_mask, img, match_erode);
        MatchReport rep = match_fraction(img, pat, region, match_r, threads);
        write_output(man, match_out, dump_json(match_report_to_json(rep)));
    } else if (*dp) {
        man.cmd = "detect-period";
        man.inputs.push_back(dp_in);
        IntField img = read_igf1(dp_in);
        Region region = region_from_flags(dp_rect, dp_mask, img, 0);
        if (dp_erode > 0) region = Region::from_cells(region.with_margin(dp_erode).eroded());
        auto pat = detect_period(img, region, dp_bound);
        if (!pat) throw std::domain_error("no rank-2 period lattice found");
        write_output(man, dp_out, dump_json(pattern_to_json(*pat)));
    } else if (*ac) {
        man.cmd = "analyze-convergence";
        auto rows = convergence_report(parse_shape(ac_shape), parse_int_list(ac_ns), ac_depth, threads);
        write_output(man, ac_out, dump_json(convergence_to_json(rows)));
    } else if (*ad) {
        man.cmd = "analyze-defects";
        SuperSolution ss = ifs_generate(ad_depth);
        Solution sol = solve_least(build_mask(ShapeSpec::unit_square(), ad_n), 2, threads);
        auto rows = defect_report(sol, ss, parse_int_list(ad_rs), ad_kmax, threads);
        write_output(man, ad_out, dump_json(defects_to_json(rows)));
    } else if (*ap) {
        man.cmd = "analyze-perfect";
        std::vector<int> ms;
        for (auto m : parse_int_list(ap_ms)) ms.push_back(static_cast<int>(m));
        std::vector<std::int64_t> contrast;
        if (!ap_contrast.empty() && ap_contrast != "none") contrast = parse_int_list(ap_contrast);
        auto rows = perfect_check(ms, ap_min_patch, contrast, threads);
        write_output(man, ap_out, dump_json(perfect_to_json(rows)));
    } else if (*rd) {
        man.cmd = "render";
        if (rd_pieces_depth >= 0) {
            SuperSolution ss = ifs_generate(rd_pieces_depth);
            write_output(man, rd_out, render_pieces_ppm(ss, rd_resolution, Palette::sandpile(), threads));
        } else {
            if (rd_in.empty()) throw std::domain_error("render: need --in or --pieces-depth");
            man.inputs.push_back(rd_in);
            IntField f = read_igf1(rd_in);
            if (rd_palette == "gray") write_output(man, rd_out, render_field_pgm(f, threads));
            else write_output(man, rd_out, render_field_ppm(f, Palette::sandpile(), threads));
        }
    } else if (*ex) {
        man.cmd = "experiments";
        std::filesystem::create_directories(ex_dir);
        auto path = [&](const std::string& name) { return ex_dir + "/" + name; };

        auto ns = parse_int_list(ex_ns);
        auto rows = convergence_report(ShapeSpec::unit_square(), ns, ex_depth, threads);
        write_output(man, path("convergence.json"), dump_json(convergence_to_json(rows)));

        SuperSolution ss = ifs_generate(ex_depth);
        write_output(man, path("decay.json"), dump_json(decay_to_json(patch_measure_decay(ss))));

        Solution sol = solve_least(build_mask(ShapeSpec::unit_square(), ex_ndefect), 2, threads);
        write_output(man, path("u.igf"), encode_igf1(sol.u));
        write_output(man, path("stats.json"), dump_json(stats_to_json(sol)));
        IntField lapf = laplacian_field(sol.u, sol.u.window());
        write_output(man, path("lap.igf"), encode_igf1(lapf));
        write_output(man, path("lap.ppm"), render_field_ppm(lapf, Palette::sandpile(), threads));
        auto defects = defect_report(sol, ss, {2, 3, 5, 8}, 3, threads);
        write_output(man, path("defects.json"), dump_json(defects_to_json(defects)));

        std::vector<int> ms;
        for (auto m : parse_int_list(ex_ms)) ms.push_back(static_cast<int>(m));
        auto perfect = perfect_check(ms, 25, {200}, threads);
        write_output(man, path("perfect.json"), dump_json(perfect_to_json(perfect)));

        write_output(man, path("manifest.json"), dump_json(Json{{"tool", "sandpile"},
                                                                {"version", kVersion},
                                                                {"outputs", man.outputs}}));
    }

    man.print();
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    try {
        return run(argc, argv);
    } catch (const std::domain_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "internal error: %s\n", e.what());
        return 1;
    }
}

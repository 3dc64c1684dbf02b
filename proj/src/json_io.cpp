#include "sandpile/json_io.hpp"

#include <nlohmann/json.hpp>

namespace sandpile {

namespace {

Json rat_json(const Rat& r) { return rat_to_string(r); }

Json point_json(const RatPoint& p) { return Json::array({rat_json(p.x), rat_json(p.y)}); }

Json mat_json(const RatMat2& m) {
    return Json::array({Json::array({rat_json(m(0, 0)), rat_json(m(0, 1))}),
                        Json::array({rat_json(m(1, 0)), rat_json(m(1, 1))})});
}

RatMat2 mat_from(const Json& j) {
    RatMat2 m;
    for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 2; ++c)
            m(r, c) = rat_from_string(j.at(static_cast<std::size_t>(r)).at(static_cast<std::size_t>(c)).get<std::string>());
    return m;
}

}  // namespace

Json pattern_to_json(const PeriodicPattern& p) {
    Json tile = Json::array();
    for (const auto& [cell, v] : p.tile())
        tile.push_back({{"x", cell.first}, {"y", cell.second}, {"v", v}});
    return Json{{"basis", Json::array({Json::array({p.basis1()[0], p.basis1()[1]}),
                                       Json::array({p.basis2()[0], p.basis2()[1]})})},
                {"tile", tile}};
}

PeriodicPattern pattern_from_json(const Json& j) {
    const auto& b = j.at("basis");
    IVec2 v1{b.at(0).at(0).get<std::int64_t>(), b.at(0).at(1).get<std::int64_t>()};
    IVec2 v2{b.at(1).at(0).get<std::int64_t>(), b.at(1).at(1).get<std::int64_t>()};
    std::map<std::pair<std::int64_t, std::int64_t>, std::int64_t> tile;
    for (const auto& c : j.at("tile"))
        tile[{c.at("x").get<std::int64_t>(), c.at("y").get<std::int64_t>()}] = c.at("v").get<std::int64_t>();
    return PeriodicPattern(v1, v2, std::move(tile));
}

Json pattern_data_to_json(const PatternData& d) {
    auto imat = [](const IMat23& m) {
        return Json::array({Json::array({m[0][0], m[0][1], m[0][2]}),
                            Json::array({m[1][0], m[1][1], m[1][2]})});
    };
    Json j{{"P", mat_json(d.P)}, {"A", imat(d.A)}, {"V", imat(d.V)}};
    if (d.tile) {
        Json tile = Json::array();
        for (const auto& [cell, v] : *d.tile)
            tile.push_back({{"x", cell.first}, {"y", cell.second}, {"lap", v}});
        j["tile"] = tile;
    }
    return j;
}

PatternData pattern_data_from_json(const Json& j) {
    PatternData d;
    d.P = mat_from(j.at("P"));
    for (int r = 0; r < 2; ++r)
        for (int c = 0; c < 3; ++c) {
            d.A[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] =
                j.at("A").at(static_cast<std::size_t>(r)).at(static_cast<std::size_t>(c)).get<std::int64_t>();
            d.V[static_cast<std::size_t>(r)][static_cast<std::size_t>(c)] =
                j.at("V").at(static_cast<std::size_t>(r)).at(static_cast<std::size_t>(c)).get<std::int64_t>();
        }
    if (j.contains("tile")) {
        std::map<std::pair<std::int64_t, std::int64_t>, std::int64_t> tile;
        for (const auto& c : j.at("tile"))
            tile[{c.at("x").get<std::int64_t>(), c.at("y").get<std::int64_t>()}] =
                c.at("lap").get<std::int64_t>();
        d.tile = std::move(tile);
    }
    return d;
}

Json match_report_to_json(const MatchReport& r) {
    Json offs = Json::array();
    for (const auto& [off, count] : r.offsets)
        offs.push_back({{"x", off.first}, {"y", off.second}, {"count", count}});
    return Json{{"region", r.region}, {"r", r.r},           {"total", r.total},
                {"matched", r.matched}, {"fraction", r.fraction}, {"offsets", offs}};
}

Json pieces_to_json(const std::vector<QuadraticPiece>& ps) {
    Json arr = Json::array();
    for (const auto& p : ps) {
        Json verts = Json::array();
        for (const auto& v : p.vertices) verts.push_back(point_json(v));
        Json j{{"word", p.word},
               {"family", p.family == PatchFamily::Base ? "base" : (p.family == PatchFamily::W ? "w" : "z")},
               {"P", mat_json(p.P)},
               {"b", point_json(p.b)},
               {"c", rat_json(p.c)},
               {"area", rat_json(p.area)},
               {"gamma_plus_candidate", p.gamma_plus_candidate},
               {"vertices", verts}};
        arr.push_back(std::move(j));
    }
    return arr;
}

Json stats_to_json(const Solution& sol) {
    return Json{{"n", sol.mask.n},
                {"shape", sol.mask.shape.name()},
                {"cutoff", sol.cutoff},
                {"members", sol.mask.member_count},
                {"sweeps", sol.stats.sweeps},
                {"updates", sol.stats.updates},
                {"wall_ms", sol.stats.wall_ms},
                {"strategy", sol.stats.strategy},
                {"burn_pass", sol.stats.burn_pass}};
}

Json convergence_to_json(const std::vector<ConvergenceRow>& rows) {
    Json arr = Json::array();
    for (const auto& r : rows) {
        Json j{{"n", r.n},
               {"depth", r.depth},
               {"members", r.members},
               {"sup_error", r.sup_error},
               {"sup_error_depth_minus_1", r.sup_error_prev},
               {"normalized", r.normalized},
               {"burn_pass", r.burn_pass}};
        if (r.exponent) j["exponent"] = *r.exponent;
        arr.push_back(std::move(j));
    }
    return arr;
}

Json defects_to_json(const std::vector<DefectReport>& rows) {
    Json arr = Json::array();
    for (const auto& r : rows) {
        Json verts = Json::array();
        for (const auto& v : r.patch_scaled) verts.push_back(point_json(v));
        arr.push_back(Json{{"k", r.k},
                           {"word", r.word},
                           {"r", r.r},
                           {"eroded_points", r.eroded_points},
                           {"fraction", r.fraction},
                           {"fraction_fixed_region", r.fraction_fixed},
                           {"covolume", r.covolume},
                           {"period_detected", r.period_detected},
                           {"skipped", r.skipped},
                           {"patch", verts}});
    }
    return arr;
}

Json perfect_to_json(const std::vector<PerfectPatchRow>& rows) {
    Json arr = Json::array();
    for (const auto& r : rows)
        arr.push_back(Json{{"n", r.n},
                           {"power_of_three", r.power_of_three},
                           {"k", r.k},
                           {"word", r.word},
                           {"points", r.points},
                           {"defects", r.defects},
                           {"covolume", r.covolume},
                           {"period_detected", r.period_detected}});
    return arr;
}

Json decay_to_json(const DecayReport& rep) {
    Json areas = Json::array();
    for (const auto& a : rep.w_areas_sorted) areas.push_back(rat_to_string(a));
    return Json{{"w_areas_sorted", areas},
                {"w_total", rat_to_string(rep.w_total)},
                {"unresolved_z_total", rat_to_string(rep.z_total)},
                {"base_area", rat_to_string(rep.base_area)},
                {"sums_to_one", rep.sums_to_one},
                {"ratio", rep.ratio},
                {"decay_ok", rep.decay_ok}};
}

std::string dump_json(const Json& j) { return j.dump(2) + "\n"; }

}  // namespace sandpile

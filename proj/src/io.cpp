#include "chs/io.hpp"

#include <fstream>
#include <iostream>
#include <sstream>

#include <json.hpp>

namespace chs {

using nlohmann::json;

namespace {

json mat_to_json(const Mat2R& m) {
    return json::array({json::array({m.a11, m.a12}), json::array({m.a21, m.a22})});
}

Mat2R mat_from_json(const json& j) {
    if (!j.is_array() || j.size() != 2 || j[0].size() != 2 || j[1].size() != 2)
        throw ParseError("expected a 2x2 matrix as [[a,b],[c,d]]");
    return {j[0][0].get<double>(), j[0][1].get<double>(), j[1][0].get<double>(),
            j[1][1].get<double>()};
}

}  // namespace

std::string hamiltonian_to_json(const PiecewiseHamiltonian& h) {
    json cells = json::array();
    for (const auto& c : h.cells) {
        json jc;
        jc["len"] = c.len;
        if (c.kind == Cell::Kind::Constant) {
            jc["h"] = mat_to_json(c.h);
        } else {
            jc["n0"] = mat_to_json(c.frame);
            jc["w"] = mat_to_json(c.w);
        }
        cells.push_back(std::move(jc));
    }
    json j;
    j["cells"] = std::move(cells);
    j["tail"] = {{"h", mat_to_json(h.tail)}};
    return j.dump();
}

PiecewiseHamiltonian hamiltonian_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const std::exception& e) {
        throw ParseError(std::string("hamiltonian JSON: ") + e.what());
    }
    if (!j.contains("cells") || !j.contains("tail"))
        throw ParseError("hamiltonian JSON: missing \"cells\" or \"tail\"");
    PiecewiseHamiltonian h;
    for (const auto& jc : j["cells"]) {
        if (!jc.contains("len")) throw ParseError("cell without \"len\"");
        const double len = jc["len"].get<double>();
        if (jc.contains("h"))
            h.cells.push_back(Cell::constant(len, mat_from_json(jc["h"])));
        else if (jc.contains("n0") && jc.contains("w"))
            h.cells.push_back(Cell::dirac(len, mat_from_json(jc["n0"]), mat_from_json(jc["w"])));
        else
            throw ParseError("cell needs either \"h\" or \"n0\"+\"w\"");
    }
    h.tail = mat_from_json(j["tail"].at("h"));
    return h;
}

std::string factorization_to_json(const FactorizationTriple& f) {
    json j;
    j["grid"] = f.grid;
    auto dump = [](const std::vector<Mat2R>& v) {
        json a = json::array();
        for (const auto& m : v) a.push_back(mat_to_json(m));
        return a;
    };
    j["G"] = dump(f.G);
    j["Q"] = dump(f.Q);
    j["V1"] = dump(f.V1);
    j["V2"] = dump(f.V2);
    j["norms"] = {{"q", f.norms.q}, {"v1", f.norms.v1}, {"v2", f.norms.v2}};
    return j.dump();
}

FactorizationTriple factorization_from_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const std::exception& e) {
        throw ParseError(std::string("factorization JSON: ") + e.what());
    }
    FactorizationTriple f;
    f.grid = j.at("grid").get<std::vector<double>>();
    auto load = [&](const char* key, std::vector<Mat2R>& out) {
        for (const auto& m : j.at(key)) out.push_back(mat_from_json(m));
    };
    load("G", f.G);
    load("Q", f.Q);
    load("V1", f.V1);
    load("V2", f.V2);
    if (f.grid.size() != f.G.size() || f.grid.size() != f.Q.size() ||
        f.grid.size() != f.V1.size() || f.grid.size() != f.V2.size())
        throw ParseError("factorization JSON: array lengths disagree");
    f.norms.q = j.at("norms").at("q").get<double>();
    f.norms.v1 = j.at("norms").at("v1").get<double>();
    f.norms.v2 = j.at("norms").at("v2").get<double>();
    f.extent = f.grid.empty() ? 0.0 : f.grid.back();

    // piecewise-linear reconstruction between grid samples
    auto fp = std::make_shared<FactorizationTriple>();
    fp->grid = f.grid;
    fp->G = f.G;
    fp->Q = f.Q;
    fp->V1 = f.V1;
    fp->V2 = f.V2;
    auto interp = [fp](const std::vector<Mat2R>& v, double t) {
        const auto& g = fp->grid;
        if (t <= g.front()) return v.front();
        if (t >= g.back()) return v.back();
        std::size_t lo = 0, hi = g.size() - 1;
        while (lo + 1 < hi) {
            const std::size_t mid = (lo + hi) / 2;
            (g[mid] <= t ? lo : hi) = mid;
        }
        const double s = (t - g[lo]) / (g[lo + 1] - g[lo]);
        return v[lo] * (1.0 - s) + v[lo + 1] * s;
    };
    f.G_eval = [fp, interp](double t) { return interp(fp->G, t); };
    FactorizationTriple::Piece p;
    p.t0 = 0;
    p.t1 = f.extent;
    p.constant = false;
    p.eval = [fp, interp](double t, Mat2R& q, Mat2R& v1, Mat2R& v2) {
        q = interp(fp->Q, t);
        v1 = interp(fp->V1, t);
        v2 = interp(fp->V2, t);
    };
    f.pieces.push_back(std::move(p));
    f.smooth_breaks = f.grid;
    return f;
}

void write_csv(std::ostream& os, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows) {
    for (std::size_t i = 0; i < header.size(); ++i)
        os << header[i] << (i + 1 < header.size() ? "," : "\n");
    os.precision(17);
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i)
            os << row[i] << (i + 1 < row.size() ? "," : "\n");
    }
}

std::string read_file(const std::string& path) {
    if (path == "-") {
        std::ostringstream ss;
        ss << std::cin.rdbuf();
        return ss.str();
    }
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw Error("cannot write " + path);
    out << text;
}

}  // namespace chs

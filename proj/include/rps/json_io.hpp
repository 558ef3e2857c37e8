#ifndef RPS_JSON_IO_HPP
#define RPS_JSON_IO_HPP

#include <json.hpp>

#include <optional>
#include <string>
#include <vector>

#include "rps/algebra.hpp"
#include "rps/classify.hpp"
#include "rps/pi.hpp"

namespace rps {

using Json = nlohmann::ordered_json; // preserves key order for stable output

// ---------------------------------------------------------------------------
// Structure-constant format:
//   {"basis": ["1","P","R","S"], "unit": 0, "table": [[["0","1",...], ...]]}
// table[i][j] is the coordinate vector of E_i * E_j, coordinates written in
// the scalar syntax of the chosen field.

inline AlgebraPtr algebra_from_json(const Json& j, const FieldSpec& field,
                                    const std::string& name = "custom")
{
    if (!j.contains("basis") || !j.contains("table"))
        throw Error(Err::BadInput, "algebra JSON needs 'basis' and 'table'");
    std::vector<std::string> labels = j.at("basis").get<std::vector<std::string>>();
    std::size_t d = labels.size();
    const Json& tbl = j.at("table");
    if (tbl.size() != d)
        throw Error(Err::BadInput, "table must have one row per basis element");
    std::vector<std::vector<FieldElement>> table;
    table.reserve(d * d);
    for (std::size_t i = 0; i < d; ++i) {
        if (tbl[i].size() != d)
            throw Error(Err::BadInput, "table row " + std::to_string(i) + " has wrong length");
        for (std::size_t jj = 0; jj < d; ++jj) {
            const Json& cell = tbl[i][jj];
            if (cell.size() != d)
                throw Error(Err::BadInput, "table cell has wrong coordinate count");
            std::vector<FieldElement> coords;
            coords.reserve(d);
            for (const auto& s : cell)
                coords.push_back(parse_scalar(s.get<std::string>(), field));
            table.push_back(std::move(coords));
        }
    }
    std::optional<std::size_t> unit;
    if (j.contains("unit") && !j.at("unit").is_null())
        unit = j.at("unit").get<std::size_t>();
    return MonadAlgebra::create(field, std::move(labels), std::move(table), unit,
                                AlgebraKind::Generic, name);
}

inline Json algebra_to_json(const MonadAlgebra& a)
{
    Json j;
    j["basis"] = a.basis_labels();
    if (a.unit_index())
        j["unit"] = *a.unit_index();
    else
        j["unit"] = nullptr;
    Json tbl = Json::array();
    for (std::size_t i = 0; i < a.dim(); ++i) {
        Json row = Json::array();
        for (std::size_t jj = 0; jj < a.dim(); ++jj) {
            Json cell = Json::array();
            for (const auto& c : a.table_at(i, jj))
                cell.push_back(c.str());
            row.push_back(std::move(cell));
        }
        tbl.push_back(std::move(row));
    }
    j["table"] = std::move(tbl);
    return j;
}

// ---------------------------------------------------------------------------

inline Json witness_to_json(const Witness& w)
{
    Json j;
    Json args = Json::array();
    for (const auto& a : w.args)
        args.push_back(a.str());
    j["args"] = std::move(args);
    j["value"] = w.value.str();
    return j;
}

inline Json classification_to_json(const Polynomial& p, const MonadAlgebra& a,
                                   const ImageClass& cls)
{
    Json j;
    j["polynomial"] = p.str();
    j["algebra"] = a.name();
    j["field"] = a.field().name();
    j["coefficient_sum"] = cls.coeff_sum.str();
    j["span_dim"] = cls.span_dim;
    j["class"] = image_tag_name(cls.tag);
    if (cls.line_direction)
        j["line_direction"] = cls.line_direction->str();
    if (!cls.plane_basis.empty()) {
        Json basis = Json::array();
        for (const auto& b : cls.plane_basis)
            basis.push_back(b.str());
        j["plane_basis"] = std::move(basis);
    }
    Json ws = Json::array();
    for (const auto& w : cls.witnesses)
        ws.push_back(witness_to_json(w));
    j["witnesses"] = std::move(ws);
    j["theorem_label"] = cls.theorem_label;
    return j;
}

inline Json span_report_to_json(const Polynomial& p, const MonadAlgebra& a, const SpanReport& rep)
{
    Json j;
    j["polynomial"] = p.str();
    j["algebra"] = a.name();
    j["field"] = a.field().name();
    j["span_dim"] = rep.dimension;
    j["exhausted"] = rep.exhausted;
    j["tuples_checked"] = rep.tuples_checked;
    Json basis = Json::array();
    for (const auto& b : rep.span_basis)
        basis.push_back(b.str());
    j["span_basis"] = std::move(basis);
    Json ws = Json::array();
    for (const auto& w : rep.witnesses)
        ws.push_back(witness_to_json(w));
    j["witnesses"] = std::move(ws);
    return j;
}

inline Json pi_report_to_json(const Polynomial& p, const MonadAlgebra& a, const PIReport& rep)
{
    Json j;
    j["polynomial"] = p.str();
    j["algebra"] = a.name();
    j["field"] = a.field().name();
    j["is_pi"] = rep.is_pi;
    j["exhaustive"] = rep.exhaustive;
    j["integer_certified"] = rep.integer_certified;
    j["tuples_checked"] = rep.tuples_checked;
    if (rep.counterexample) {
        j["counterexample"] = witness_to_json(*rep.counterexample);
        j["counterexample_primes"] = rep.counterexample_primes;
    }
    return j;
}

inline Json nullspace_to_json(const MonadAlgebra& a, const NullspaceBasis& ns)
{
    Json j;
    j["degree"] = ns.degree;
    j["algebra"] = a.name();
    j["field"] = ns.field.name();
    Json mons = Json::array();
    for (const auto& t : ns.monomials)
        mons.push_back(t.str());
    j["monomials"] = std::move(mons);
    j["system_rows"] = ns.system_rows;
    j["rows_streamed"] = ns.rows_streamed;
    j["system_rank"] = ns.system_rank;
    j["nullspace_dim"] = ns.vectors.size();
    Json ids = Json::array();
    for (const auto& p : ns.polynomials())
        ids.push_back(p.str());
    j["identities"] = std::move(ids);
    return j;
}

} // namespace rps

#endif // RPS_JSON_IO_HPP

#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "chs/factorization.hpp"
#include "chs/hamiltonian.hpp"

namespace chs {

// Hamiltonian JSON schema (bit-exact round trip):
//   {"cells":[{"len":1.0,"h":[[1.0,0.0],[0.0,1.0]]}, ...],
//    "tail":{"h":[[...],[...]]}}
// Dirac cells carry {"len":...,"n0":[[...]],"w":[[...]]} instead of "h".
std::string hamiltonian_to_json(const PiecewiseHamiltonian& h);
PiecewiseHamiltonian hamiltonian_from_json(const std::string& text);

// Factorization JSON export:
//   {"grid":[...],"G":[[[..],[..]],...],"Q":[...],"V1":[...],"V2":[...],
//    "norms":{"q":..,"v1":..,"v2":..}}
std::string factorization_to_json(const FactorizationTriple& f);

// Import of a sampled triple (piecewise-linear evaluators between grid
// points; used by the verification CLI on externally supplied tables).
FactorizationTriple factorization_from_json(const std::string& text);

// CSV with a header row.
void write_csv(std::ostream& os, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

std::string read_file(const std::string& path);   // "-" reads standard input
void write_file(const std::string& path, const std::string& text);

}  // namespace chs

#ifndef CHAINMIX_IO_HPP
#define CHAINMIX_IO_HPP

#include <string>

#include "chainmix/cutoff.hpp"
#include "chainmix/prob.hpp"
#include "chainmix/traject.hpp"
#include "chainmix/two_host.hpp"

namespace chainmix {

/// Shortest decimal round-trip representation, 17 significant digits.
std::string format_double(double x);

/// Writes the full content to path via a temporary file in the same
/// directory plus rename, so readers never observe a partial file.
void atomic_write_text(const std::string& path, const std::string& content);

/// CSV with header "time,value" (exact profiles) or "time,value,se"
/// (Monte-Carlo profiles), LF line endings.
std::string tv_profile_csv(const TVProfile& profile);

/// CSV with header "index,value".
std::string prob_vector_csv(const ProbVector& p);

/// CSV with header "time,x1,x2"; the first row is the initial state at
/// time 0.
std::string jump_path_csv(const JumpPath<EpiState>& path);

}  // namespace chainmix

#endif

#pragma once

#include <iosfwd>
#include <optional>
#include <string>

namespace fiolab {

// Exit codes: 0 pass or exploratory, 1 fail, 2 configuration error,
// quadrature refusal or I/O failure.
int cli_run(const std::string& config_path, const std::optional<std::string>& out_dir,
            std::optional<int> workers, std::ostream& out, std::ostream& err);
int cli_list(bool all, std::ostream& out);
int cli_certify(const std::string& phase_id, const std::string& flavor, int n, std::ostream& out,
                std::ostream& err);

}  // namespace fiolab

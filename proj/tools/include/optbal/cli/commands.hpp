#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "optbal/cli/config.hpp"

namespace optbal::cli {

/// Process exit codes.
enum ExitCode : int {
  kOk = 0,
  kVerifyFailed = 1,
  kConfigError = 2,
  kIoError = 3,
  kDataError = 4,
};

/// Malformed or insufficient input data (CSV rows, fit windows).
class DataError : public Error {
 public:
  using Error::Error;
};

inline constexpr const char* kCsvHeader =
    "epsilon,ramp,a,t1_slow,imbalance,residual_initial,residual_rebalance,iters_initial,"
    "iters_rebalance,status";

/// 17 significant digits; "nan" / "inf" for non-finite values.
std::string format_real(double x);

void write_records_csv(std::ostream& out, const std::vector<ImbalanceRecord>& records);
/// DataError on a wrong header or malformed row.
std::vector<ImbalanceRecord> read_records_csv(std::istream& in);

/// Rows in config order: for each ramp, for each a, eps descending.
std::vector<ImbalanceRecord> run_sweep(const RunConfig& cfg, unsigned workers);

struct FitRequest {
  FitMode mode = FitMode::order;
  FitWindow window = FitWindow::all();
  double d = 1.0;
};

struct GroupFit {
  std::string ramp;
  double slow_horizon = 0.0;
  FitResult result;
};

/// One fit per (ramp, a) group in first-appearance order. DataError if a
/// group has too few usable points or violates the model's domain.
std::vector<GroupFit> fit_groups(const std::vector<ImbalanceRecord>& records,
                                 const FitRequest& req);

/// Machine-readable summary line beginning with "FIT:".
std::string fit_line(const GroupFit& g, FitMode mode);

int cmd_balance(const RunConfig& cfg, const std::optional<std::string>& trajectory_path,
                std::ostream& out, std::ostream& err);
int cmd_sweep(const RunConfig& cfg, const std::string& out_path, unsigned workers,
              std::ostream& out, std::ostream& err);
int cmd_fit(const std::string& csv_path, const FitRequest& req, std::ostream& out,
            std::ostream& err);
int cmd_verify_theorem1(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_verify_lemmas(int conv_n_max, int conv_k_max, int multi_n_max, int multi_s_max,
                      int multi_k_max, std::ostream& out, std::ostream& err);
int cmd_verify_gevrey(int n_max, double lambda, std::ostream& out, std::ostream& err);

/// Full command-line entry point; never throws.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace optbal::cli

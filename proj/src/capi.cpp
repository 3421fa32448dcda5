#include "apcs/apcs.h"

#include <cstring>
#include <new>
#include <string>

#include "apcs/config.hpp"
#include "apcs/errors.hpp"
#include "apcs/pipeline.hpp"
#include "apcs/polychaos.hpp"

using apcs::ConfigError;
using apcs::NumericalError;

struct apcs_config {
  apcs::ConfigFile file;
};

struct apcs_surrogate {
  apcs::PCSurrogate surrogate;
};

namespace {

void copy_message(const char* what, char* err, size_t err_len) {
  if (!err || err_len == 0) return;
  std::strncpy(err, what, err_len - 1);
  err[err_len - 1] = '\0';
}

template <typename Fn>
int guarded(Fn&& fn, char* err, size_t err_len) {
  try {
    fn();
    return APCS_OK;
  } catch (const ConfigError& e) {
    copy_message(e.what(), err, err_len);
    return APCS_ERR_CONFIG;
  } catch (const NumericalError& e) {
    copy_message(e.what(), err, err_len);
    return APCS_ERR_NUMERICAL;
  } catch (const std::exception& e) {
    copy_message(e.what(), err, err_len);
    return APCS_ERR_OTHER;
  } catch (...) {
    copy_message("unknown error", err, err_len);
    return APCS_ERR_OTHER;
  }
}

} // namespace

extern "C" {

const char* apcs_version(void) { return apcs::kVersion; }

int apcs_config_open(const char* path, apcs_config** out, char* err, size_t err_len) {
  if (!path || !out) {
    copy_message("null argument", err, err_len);
    return APCS_ERR_CONFIG;
  }
  *out = nullptr;
  return guarded(
      [&] { *out = new apcs_config{apcs::ConfigFile::parse_file(path)}; }, err, err_len);
}

int apcs_config_set(apcs_config* cfg, const char* section, const char* key,
                    const char* value, char* err, size_t err_len) {
  if (!cfg || !section || !key || !value) {
    copy_message("null argument", err, err_len);
    return APCS_ERR_CONFIG;
  }
  return guarded([&] { cfg->file.set(section, key, value); }, err, err_len);
}

void apcs_config_close(apcs_config* cfg) { delete cfg; }

int apcs_run_stage(const apcs_config* cfg, const char* stage, char* err, size_t err_len) {
  if (!cfg || !stage) {
    copy_message("null argument", err, err_len);
    return APCS_ERR_CONFIG;
  }
  return guarded([&] { apcs::run_stage(cfg->file, stage); }, err, err_len);
}

int apcs_surrogate_open(const char* path, apcs_surrogate** out, char* err,
                        size_t err_len) {
  if (!path || !out) {
    copy_message("null argument", err, err_len);
    return APCS_ERR_CONFIG;
  }
  *out = nullptr;
  return guarded(
      [&] { *out = new apcs_surrogate{apcs::PCSurrogate::load_file(path)}; }, err,
      err_len);
}

int apcs_surrogate_dims(const apcs_surrogate* s, int* n_inputs, int* n_outputs) {
  if (!s) return APCS_ERR_CONFIG;
  if (n_inputs) *n_inputs = s->surrogate.input_dim();
  if (n_outputs) *n_outputs = s->surrogate.output_dim();
  return APCS_OK;
}

int apcs_surrogate_eval(const apcs_surrogate* s, const double* y, double* out,
                        char* err, size_t err_len) {
  if (!s || !y || !out) {
    copy_message("null argument", err, err_len);
    return APCS_ERR_CONFIG;
  }
  return guarded(
      [&] {
        Eigen::Map<const Eigen::VectorXd> input(y, s->surrogate.input_dim());
        Eigen::VectorXd g = s->surrogate.evaluate(input);
        std::memcpy(out, g.data(), sizeof(double) * static_cast<size_t>(g.size()));
      },
      err, err_len);
}

void apcs_surrogate_close(apcs_surrogate* s) { delete s; }

} // extern "C"

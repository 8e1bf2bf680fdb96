#include "vaxsite/vaxsite.h"

#include <cstring>
#include <memory>
#include <new>

#include "vaxsite/app.hpp"

using namespace vaxsite;

struct vxs_config {
  app::RunConfig config;
};

struct vxs_model {
  plan::PlanModel model;
  solve::Limits limits;
};

struct vxs_result {
  app::CommandResult result;
};

namespace {

thread_local std::string g_last_error;

vxs_status fail(vxs_status status, std::string message) {
  g_last_error = std::move(message);
  return status;
}

// Maps exceptions to status codes at the boundary.
template <typename F>
vxs_status guarded(F&& body) {
  try {
    g_last_error.clear();
    return body();
  } catch (const Error& e) {
    return fail(static_cast<vxs_status>(app::exit_code_for(e.code())), e.what());
  } catch (const std::bad_alloc&) {
    return fail(VXS_INTERNAL_ERROR, "out of memory");
  } catch (const std::exception& e) {
    return fail(VXS_INTERNAL_ERROR, e.what());
  }
}

vxs_status null_argument(const char* name) {
  return fail(VXS_INPUT_ERROR, std::string("null argument '") + name + "'");
}

}  // namespace

extern "C" {

const char* vxs_version(void) { return app::kVersion; }

const char* vxs_last_error(void) { return g_last_error.c_str(); }

vxs_status vxs_config_new(vxs_config** out) {
  if (!out) return null_argument("out");
  return guarded([&] {
    *out = new vxs_config{};
    return VXS_OK;
  });
}

vxs_status vxs_config_load(const char* path, vxs_config** out) {
  if (!path) return null_argument("path");
  if (!out) return null_argument("out");
  *out = nullptr;
  return guarded([&] {
    auto c = std::make_unique<vxs_config>();
    c->config = app::load_config(path);
    *out = c.release();
    return VXS_OK;
  });
}

vxs_status vxs_config_set(vxs_config* config, const char* key, const char* value) {
  if (!config) return null_argument("config");
  if (!key) return null_argument("key");
  if (!value) return null_argument("value");
  return guarded([&] {
    app::set_option(config->config, key, value);
    return VXS_OK;
  });
}

vxs_status vxs_config_get(const vxs_config* config, const char* key, char* buf, size_t cap,
                          size_t* length) {
  if (!config) return null_argument("config");
  if (!key) return null_argument("key");
  return guarded([&] {
    for (const auto& [k, v] : app::config_entries(config->config)) {
      if (k != key) continue;
      if (length) *length = v.size();
      if (buf && cap > 0) {
        const auto n = std::min(cap - 1, v.size());
        std::memcpy(buf, v.data(), n);
        buf[n] = '\0';
      }
      return VXS_OK;
    }
    return fail(VXS_INPUT_ERROR, std::string("ConfigError: unknown key '") + key + "'");
  });
}

void vxs_config_free(vxs_config* config) { delete config; }

vxs_status vxs_model_build(const vxs_config* config, vxs_model** out) {
  if (!config) return null_argument("config");
  if (!out) return null_argument("out");
  *out = nullptr;
  return guarded([&] {
    const auto inputs = app::load_inputs(config->config);
    solve::Limits limits;
    limits.max_subsets = config->config.max_subsets;
    limits.time_budget = std::chrono::duration<double>(config->config.time_budget);
    *out = new vxs_model{app::build_model(config->config, inputs), limits};
    return VXS_OK;
  });
}

size_t vxs_model_variable_count(const vxs_model* model) {
  return model ? model->model.variables().size() : 0;
}

size_t vxs_model_constraint_count(const vxs_model* model) {
  return model ? model->model.constraints().size() : 0;
}

size_t vxs_model_district_count(const vxs_model* model) {
  return model ? model->model.instance().size() : 0;
}

vxs_status vxs_model_solve(const vxs_model* model, double* objective, int* open_sites) {
  if (!model) return null_argument("model");
  if (!objective) return null_argument("objective");
  return guarded([&] {
    const auto report = solve::solve_exhaustive(model->model, model->limits);
    if (!report.plan) return fail(VXS_INFEASIBLE, "Infeasible: no feasible plan");
    *objective = report.objective;
    if (open_sites) {
      const auto& open = report.plan->open();
      for (std::size_t w = 0; w < open.size(); ++w) open_sites[w] = open[w] ? 1 : 0;
    }
    return VXS_OK;
  });
}

vxs_status vxs_model_export_mps(const vxs_model* model, const char* path) {
  if (!model) return null_argument("model");
  if (!path) return null_argument("path");
  return guarded([&] {
    solve::export_mps(model->model, std::filesystem::path(path));
    return VXS_OK;
  });
}

void vxs_model_free(vxs_model* model) { delete model; }

size_t vxs_command_count(void) { return app::command_names().size(); }

const char* vxs_command_name(size_t index) {
  static const auto names = app::command_names();
  return index < names.size() ? names[index].c_str() : nullptr;
}

vxs_status vxs_run(const vxs_config* config, const char* command, const char* out_dir,
                   const char* plan_path, unsigned flags, vxs_result** out) {
  if (!config) return null_argument("config");
  if (!command) return null_argument("command");
  if (!out_dir) return null_argument("out_dir");
  if (!out) return null_argument("out");
  *out = nullptr;
  return guarded([&] {
    app::CommandArgs args;
    args.out_dir = out_dir;
    if (plan_path) args.plan = plan_path;
    args.write_mps = flags & VXS_RUN_WRITE_MPS;
    args.synthetic_observed = flags & VXS_RUN_SYNTHETIC_OBSERVED;
    auto r = std::make_unique<vxs_result>();
    r->result = app::run_command(command, config->config, args);
    const auto status = static_cast<vxs_status>(r->result.exit_code);
    if (status != VXS_OK) g_last_error = r->result.summary;
    *out = r.release();
    return status;
  });
}

int vxs_result_exit_code(const vxs_result* result) {
  return result ? result->result.exit_code : VXS_INPUT_ERROR;
}

const char* vxs_result_summary(const vxs_result* result) {
  return result ? result->result.summary.c_str() : "";
}

size_t vxs_result_output_count(const vxs_result* result) {
  return result ? result->result.outputs.size() : 0;
}

const char* vxs_result_output(const vxs_result* result, size_t index) {
  if (!result || index >= result->result.outputs.size()) return nullptr;
  return result->result.outputs[index].c_str();
}

void vxs_result_free(vxs_result* result) { delete result; }

}  // extern "C"

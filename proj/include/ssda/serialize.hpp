#pragma once

#include <string>
#include <vector>

#include "ssda/dsda.hpp"
#include "ssda/transform.hpp"

namespace ssda {

// Versioned JSON text formats. Doubles are written with round-trip precision,
// so save -> load -> predict is bitwise identical to in-memory predict.

std::string transform_to_json(const TransformModel& model,
                              const std::vector<std::string>& label_names = {});
TransformModel transform_from_json(const std::string& text,
                                   std::vector<std::string>* label_names = nullptr);

std::string fit_to_json(const DsdaFit& fit, const std::vector<std::string>& label_names = {});
DsdaFit fit_from_json(const std::string& text, std::vector<std::string>* label_names = nullptr);

void write_text_file(const std::string& path, const std::string& text);
std::string read_text_file(const std::string& path);

}  // namespace ssda

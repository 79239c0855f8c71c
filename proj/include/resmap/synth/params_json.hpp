#pragma once

#include <string_view>

#include "resmap/io/json_util.hpp"
#include "resmap/synth/annotate.hpp"
#include "resmap/synth/render.hpp"
#include "resmap/synth/scene.hpp"

namespace resmap::synth {

// JSON mapping of the generator parameters. Parsing starts from the passed
// defaults, so partial objects are fine; unknown keys raise DataError.

io::Json to_json(const SceneParams& p);
io::Json to_json(const RenderParams& p);
io::Json to_json(const AnnotatorProfile& p);

void parse(const io::Json& j, SceneParams& out, std::string_view where);
void parse(const io::Json& j, RenderParams& out, std::string_view where);
void parse(const io::Json& j, AnnotatorProfile& out, std::string_view where);

std::string_view management_name(Management m);
Management parse_management(std::string_view name);

}  // namespace resmap::synth

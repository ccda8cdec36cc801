#pragma once

namespace nssfr {

const char* version();

} // namespace nssfr

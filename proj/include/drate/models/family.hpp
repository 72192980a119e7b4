#pragma once

namespace drate::models {

enum class Family { gaussian, binomial };

}  // namespace drate::models

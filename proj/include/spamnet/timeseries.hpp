#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "spamnet/errors.hpp"

namespace spamnet {

/// Multivariate series: rows are consecutive time points, columns are nodes.
/// With T+1 rows there are T usable transitions (X_t -> X_{t+1}).
struct TimeSeries {
    Eigen::MatrixXd values;  // (T+1) x d
    std::vector<std::string> column_names;

    Eigen::Index rows() const { return values.rows(); }
    Eigen::Index dim() const { return values.cols(); }
    Eigen::Index transitions() const { return values.rows() - 1; }

    void validate() const {
        if (values.rows() < 2) throw DataError("time series needs at least 2 rows");
        if (values.cols() < 1) throw DataError("time series needs at least 1 column");
        if (!values.allFinite()) throw DataError("time series has non-finite entries");
        if (!column_names.empty() &&
            static_cast<Eigen::Index>(column_names.size()) != values.cols())
            throw DataError("column name count does not match dimension");
    }

    /// Rows [first, first+count) as a new series.
    TimeSeries window(Eigen::Index first, Eigen::Index count) const {
        TimeSeries out;
        out.values = values.middleRows(first, count);
        out.column_names = column_names;
        return out;
    }
};

}  // namespace spamnet

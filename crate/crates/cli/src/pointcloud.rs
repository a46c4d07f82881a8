use permlm::Matrix;

/// An n x k point set: the first two columns are coordinates, any further
/// columns are extra linear attributes carried through the transform.
pub struct PointCloud {
    pub points: Matrix,
}

impl PointCloud {
    pub fn from_matrix(points: Matrix) -> Result<Self, String> {
        if points.cols() < 2 {
            return Err(format!(
                "point cloud needs at least 2 columns, got {}",
                points.cols()
            ));
        }
        if points.rows() < points.cols() {
            return Err(format!(
                "point cloud needs at least as many points ({}) as columns ({})",
                points.rows(),
                points.cols()
            ));
        }
        Ok(Self { points })
    }

    pub fn len(&self) -> usize {
        self.points.rows()
    }
}

/// Terrain, gravity, friction and sample period.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct WorldParams {
    /// Slope angle in radians, positive uphill toward `+x`.
    pub phi: f64,
    pub g: f64,
    pub mu_s: f64,
    pub mu_k: f64,
    pub dt: f64,
}

impl WorldParams {
    pub fn reference() -> Self {
        WorldParams {
            phi: 30f64.to_radians(),
            g: 9.81,
            mu_s: 0.6,
            mu_k: 0.42,
            dt: 1.0 / 200_000.0,
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        if !(self.phi >= 0.0 && self.phi < std::f64::consts::FRAC_PI_2) {
            return Err(format!("phi must lie in [0, pi/2), got {}", self.phi));
        }
        if !(self.g > 0.0 && self.g.is_finite()) {
            return Err("g must be positive".into());
        }
        if !(self.mu_k >= 0.0 && self.mu_s >= self.mu_k && self.mu_s.is_finite()) {
            return Err("friction must satisfy mu_s >= mu_k >= 0".into());
        }
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return Err("dt must be positive".into());
        }
        Ok(())
    }
}

/// Masses, spring and body inertia.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RobotParams {
    pub m_b: f64,
    pub m_f: f64,
    pub k: f64,
    pub d_0: f64,
    pub foot_radius: f64,
    /// Body inertia about its own center of mass.
    pub inertia: f64,
}

impl RobotParams {
    pub fn reference() -> Self {
        let (m_b, d_0) = (0.095, 0.10);
        RobotParams {
            m_b,
            m_f: 0.005,
            k: 500.0,
            d_0,
            foot_radius: 0.005,
            inertia: default_inertia(m_b, d_0),
        }
    }

    pub fn total_mass(&self) -> f64 {
        self.m_b + self.m_f
    }

    pub fn validate(&self) -> Result<(), String> {
        for (name, v) in [
            ("m_b", self.m_b),
            ("m_f", self.m_f),
            ("k", self.k),
            ("d_0", self.d_0),
            ("foot_radius", self.foot_radius),
            ("inertia", self.inertia),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(format!("{name} must be positive"));
            }
        }
        Ok(())
    }
}

/// Inertia of the body with a radius of gyration of half the rest length.
pub fn default_inertia(m_b: f64, d_0: f64) -> f64 {
    m_b * (d_0 / 2.0) * (d_0 / 2.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_inertia() {
        assert!((RobotParams::reference().inertia - 2.375e-4).abs() < 1e-18);
    }

    #[test]
    fn validation_names_the_field() {
        let mut r = RobotParams::reference();
        r.k = -1.0;
        assert_eq!(r.validate().unwrap_err(), "k must be positive");
        let mut w = WorldParams::reference();
        w.mu_k = 0.7;
        assert!(w.validate().unwrap_err().contains("mu_s"));
        assert!(WorldParams::reference().validate().is_ok());
    }
}

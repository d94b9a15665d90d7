//! Network layouts and random-waypoint mobility.

use std::f64::consts::TAU;
use std::fmt::Write as _;

use rand::Rng;

use crate::error::{Error, Result};
use crate::format::sig9;
use crate::rng::rng_from_seed;

/// Side of the square deployment area.
pub const AREA_SIDE: f64 = 1.0;

/// Redraw limit for a single user's waypoint before the step is abandoned.
const MAX_REDRAWS: usize = 100_000;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Point {
    pub x: f64,
    pub y: f64,
}

impl Point {
    pub fn new(x: f64, y: f64) -> Self {
        Point { x, y }
    }

    pub fn distance(&self, other: &Point) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }

    fn inside(&self, side: f64) -> bool {
        (0.0..=side).contains(&self.x) && (0.0..=side).contains(&self.y)
    }
}

/// Positions of the BSs (static) and users (mobile) in the square area.
#[derive(Debug, Clone, PartialEq)]
pub struct Layout {
    pub bs_positions: Vec<Point>,
    pub user_positions: Vec<Point>,
    pub area_side: f64,
}

impl Layout {
    pub fn new(bs_positions: Vec<Point>, user_positions: Vec<Point>) -> Result<Self> {
        let layout = Layout {
            bs_positions,
            user_positions,
            area_side: AREA_SIDE,
        };
        layout.validate()?;
        Ok(layout)
    }

    pub fn num_users(&self) -> usize {
        self.user_positions.len()
    }

    pub fn num_bs(&self) -> usize {
        self.bs_positions.len()
    }

    pub fn validate(&self) -> Result<()> {
        if self.bs_positions.is_empty() || self.user_positions.is_empty() {
            return Err(Error::Config(
                "layout needs at least one BS and one user".into(),
            ));
        }
        let outside = self
            .bs_positions
            .iter()
            .chain(&self.user_positions)
            .any(|p| !p.inside(self.area_side));
        if outside {
            return Err(Error::Config("layout point outside the area".into()));
        }
        Ok(())
    }

    /// CSV rows `entity_type,index,x,y`, BSs first.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("entity_type,index,x,y\n");
        let rows = self
            .bs_positions
            .iter()
            .map(|p| ("bs", p))
            .enumerate()
            .chain(self.user_positions.iter().map(|p| ("user", p)).enumerate());
        for (index, (kind, p)) in rows {
            let _ = writeln!(out, "{kind},{index},{},{}", sig9(p.x), sig9(p.y));
        }
        out
    }
}

/// Random-waypoint step parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MobilityParams {
    pub max_transition: f64,
    pub min_transition: f64,
    /// Probability that a user stays at its waypoint for a step.
    pub pause_probability: f64,
}

impl Default for MobilityParams {
    fn default() -> Self {
        MobilityParams {
            max_transition: 0.5,
            min_transition: 0.0,
            pause_probability: 0.0,
        }
    }
}

impl MobilityParams {
    pub fn validate(&self) -> Result<()> {
        let ok = 0.0 <= self.min_transition
            && self.min_transition <= self.max_transition
            && self.max_transition <= AREA_SIDE
            && (0.0..=1.0).contains(&self.pause_probability);
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!("invalid mobility parameters {self:?}")))
        }
    }
}

/// Draws `num_bs` BS and `num_users` user positions uniformly over the area.
pub fn generate_layout(num_users: usize, num_bs: usize, seed: u64) -> Result<Layout> {
    if num_users == 0 || num_bs == 0 {
        return Err(Error::Config(format!(
            "layout needs K >= 1 and L >= 1, got K={num_users}, L={num_bs}"
        )));
    }
    let mut rng = rng_from_seed(seed);
    let mut draw = || Point::new(rng.random::<f64>() * AREA_SIDE, rng.random::<f64>() * AREA_SIDE);
    let bs_positions = (0..num_bs).map(|_| draw()).collect();
    let user_positions = (0..num_users).map(|_| draw()).collect();
    Ok(Layout {
        bs_positions,
        user_positions,
        area_side: AREA_SIDE,
    })
}

/// Position after moving `length` along direction `theta`.
pub fn displace(from: Point, length: f64, theta: f64) -> Point {
    Point::new(from.x + length * theta.cos(), from.y + length * theta.sin())
}

/// One random-waypoint transition for every user.
///
/// Draws whose destination leaves the area are rejected and both the length
/// and the direction are redrawn.
pub fn step_waypoint(layout: &Layout, params: &MobilityParams, seed: u64) -> Result<Layout> {
    layout.validate()?;
    params.validate()?;
    let mut rng = rng_from_seed(seed);
    let side = layout.area_side;
    let mut users = Vec::with_capacity(layout.num_users());
    for (k, &from) in layout.user_positions.iter().enumerate() {
        if params.pause_probability > 0.0 && rng.random::<f64>() < params.pause_probability {
            users.push(from);
            continue;
        }
        let mut moved = None;
        for _ in 0..MAX_REDRAWS {
            let length = if params.max_transition > params.min_transition {
                rng.random_range(params.min_transition..=params.max_transition)
            } else {
                params.min_transition
            };
            let theta = rng.random_range(0.0..TAU);
            let to = displace(from, length, theta);
            if to.inside(side) {
                moved = Some(to);
                break;
            }
        }
        match moved {
            Some(p) => users.push(p),
            None => {
                return Err(Error::Numerical(format!(
                    "user {k} found no feasible waypoint from ({}, {})",
                    from.x, from.y
                )))
            }
        }
    }
    Ok(Layout {
        bs_positions: layout.bs_positions.clone(),
        user_positions: users,
        area_side: side,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_point_layout_in_unit_square() {
        let layout = generate_layout(1, 1, 3).unwrap();
        assert_eq!(layout.num_users(), 1);
        assert_eq!(layout.num_bs(), 1);
        layout.validate().unwrap();
    }

    #[test]
    fn layout_sizes() {
        let layout = generate_layout(30, 50, 7).unwrap();
        assert_eq!(layout.num_users(), 30);
        assert_eq!(layout.num_bs(), 50);
    }

    #[test]
    fn layout_is_deterministic() {
        assert_eq!(generate_layout(10, 30, 11).unwrap(), generate_layout(10, 30, 11).unwrap());
        assert_ne!(generate_layout(10, 30, 11).unwrap(), generate_layout(10, 30, 12).unwrap());
    }

    #[test]
    fn rejects_empty_sets() {
        assert!(generate_layout(0, 3, 1).is_err());
        assert!(generate_layout(3, 0, 1).is_err());
    }

    #[test]
    fn zero_transition_is_identity() {
        let layout = generate_layout(20, 5, 1).unwrap();
        let params = MobilityParams {
            max_transition: 0.0,
            ..Default::default()
        };
        assert_eq!(step_waypoint(&layout, &params, 9).unwrap(), layout);
    }

    #[test]
    fn forced_displacement_geometry() {
        let p = displace(Point::new(0.5, 0.5), 0.3, 0.0);
        assert!((p.x - 0.8).abs() < 1e-15);
        assert!((p.y - 0.5).abs() < 1e-15);
    }

    #[test]
    fn corner_user_stays_inside() {
        let layout = Layout::new(vec![Point::new(0.2, 0.2)], vec![Point::new(0.99, 0.99)]).unwrap();
        let params = MobilityParams::default();
        for seed in 0..10_000 {
            let next = step_waypoint(&layout, &params, seed).unwrap();
            let p = next.user_positions[0];
            assert!(p.inside(1.0), "seed {seed} left the area: {p:?}");
            assert!(p.distance(&layout.user_positions[0]) <= params.max_transition + 1e-12);
        }
    }

    #[test]
    fn full_pause_freezes_users() {
        let layout = generate_layout(8, 3, 2).unwrap();
        let params = MobilityParams {
            pause_probability: 1.0,
            ..Default::default()
        };
        assert_eq!(step_waypoint(&layout, &params, 4).unwrap(), layout);
    }

    #[test]
    fn csv_rows() {
        let layout = Layout::new(vec![Point::new(0.5, 0.25)], vec![Point::new(0.125, 1.0)]).unwrap();
        assert_eq!(
            layout.to_csv(),
            "entity_type,index,x,y\nbs,0,0.5,0.25\nuser,0,0.125,1\n"
        );
    }
}

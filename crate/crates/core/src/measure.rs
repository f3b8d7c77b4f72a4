//! Registry of every measure the toolkit reports, with stable identifiers.

use std::fmt;
use std::str::FromStr;

use crate::class_measures::{self as cm, MeanKind, MeasureValue};
use crate::confusion::ConfusionMatrix;
use crate::error::{Error, Result};
use crate::gti::{self, GtiFit};
use crate::overall::{self, ChanceModel, Direction, UndefinedPolicy};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Measure {
    Osr,
    /// `1 - OSR`; reverses the OSR ordering, useful as a concordance check.
    ErrorRate,
    Csi,
    KappaCohen,
    PiScott,
    ReMaxwell,
    ChiSquare,
    Phi,
    CramersV,
    MutualInformation,
    TheilUEstGivenTrue,
    TheilUTrueGivenEst,
    LambdaEstGivenTrue,
    LambdaTrueGivenEst,
    Gti,
    Tpr,
    Tnr,
    Ppv,
    Npv,
    FMeasure,
    Jaccard,
    Icsi,
    Kulczynski,
    Mean(MeanKind),
    GtiClass,
}

impl Measure {
    /// Every registered measure in report order.
    pub fn all() -> Vec<Measure> {
        use Measure::*;
        let mut all = vec![
            Osr,
            ErrorRate,
            Csi,
            KappaCohen,
            PiScott,
            ReMaxwell,
            ChiSquare,
            Phi,
            CramersV,
            MutualInformation,
            TheilUEstGivenTrue,
            TheilUTrueGivenEst,
            LambdaEstGivenTrue,
            LambdaTrueGivenEst,
            Gti,
            Tpr,
            Tnr,
            Ppv,
            Npv,
            FMeasure,
            Jaccard,
            Icsi,
            Kulczynski,
        ];
        all.extend(MeanKind::ALL.into_iter().map(Mean));
        all.push(GtiClass);
        all
    }

    pub fn id(&self) -> String {
        use Measure::*;
        let id = match self {
            Osr => "osr",
            ErrorRate => "error_rate",
            Csi => "csi",
            KappaCohen => "kappa_cohen",
            PiScott => "pi_scott",
            ReMaxwell => "re_maxwell",
            ChiSquare => "chi_square",
            Phi => "phi",
            CramersV => "cramers_v",
            MutualInformation => "mutual_information",
            TheilUEstGivenTrue => "theil_u_est_given_true",
            TheilUTrueGivenEst => "theil_u_true_given_est",
            LambdaEstGivenTrue => "lambda_est_given_true",
            LambdaTrueGivenEst => "lambda_true_given_est",
            Gti => "gti",
            Tpr => "tpr",
            Tnr => "tnr",
            Ppv => "ppv",
            Npv => "npv",
            FMeasure => "f_measure",
            Jaccard => "jaccard",
            Icsi => "icsi",
            Kulczynski => "kulczynski",
            Mean(kind) => return format!("mean_{}", kind.name()),
            GtiClass => "gti_class",
        };
        id.to_string()
    }

    pub fn is_class_specific(&self) -> bool {
        use Measure::*;
        matches!(
            self,
            Tpr | Tnr | Ppv | Npv | FMeasure | Jaccard | Icsi | Kulczynski | Mean(_) | GtiClass
        )
    }

    pub fn uses_gti(&self) -> bool {
        matches!(self, Measure::Gti | Measure::GtiClass)
    }

    /// The chance model behind an agreement coefficient.
    pub fn chance_model(&self, scott_priors: Option<&[f64]>) -> Option<ChanceModel> {
        match self {
            Measure::KappaCohen => Some(ChanceModel::CohenMarginals),
            Measure::PiScott => Some(ChanceModel::ScottPriors(scott_priors.map(<[f64]>::to_vec))),
            Measure::ReMaxwell => Some(ChanceModel::MaxwellUniform),
            _ => None,
        }
    }

    /// Evaluates the measure, fitting GTI on demand.
    pub fn evaluate(
        &self,
        m: &ConfusionMatrix,
        class_index: Option<usize>,
        ctx: &MeasureContext,
    ) -> Result<MeasureValue> {
        let mut cache = GtiCache::default();
        self.evaluate_cached(m, class_index, ctx, &mut cache)
    }

    pub(crate) fn evaluate_cached(
        &self,
        m: &ConfusionMatrix,
        class_index: Option<usize>,
        ctx: &MeasureContext,
        cache: &mut GtiCache,
    ) -> Result<MeasureValue> {
        use Measure::*;
        let class = || -> Result<usize> {
            let i = class_index.ok_or_else(|| {
                Error::InvalidParameter(format!("{} needs a class index", self.id()))
            })?;
            m.check_class(i)?;
            Ok(i)
        };
        let defined = MeasureValue::Defined;
        match self {
            Osr => Ok(overall::osr(m)),
            ErrorRate => Ok(overall::osr(m).map(|v| 1.0 - v)),
            Csi => overall::csi(m, ctx.csi_policy),
            KappaCohen | PiScott | ReMaxwell => {
                let model = self
                    .chance_model(ctx.scott_priors.as_deref())
                    .expect("agreement measure");
                Ok(defined(overall::agreement(m, &model)?.value))
            }
            ChiSquare => Ok(defined(overall::chi_square(m))),
            Phi => overall::phi(m),
            CramersV => Ok(overall::cramers_v(m)),
            MutualInformation => Ok(defined(overall::mutual_information(m))),
            TheilUEstGivenTrue => Ok(overall::theil_u(m, Direction::EstimatedGivenTrue)),
            TheilUTrueGivenEst => Ok(overall::theil_u(m, Direction::TrueGivenEstimated)),
            LambdaEstGivenTrue => Ok(overall::gk_lambda(m, Direction::EstimatedGivenTrue)),
            LambdaTrueGivenEst => Ok(overall::gk_lambda(m, Direction::TrueGivenEstimated)),
            Gti => cache.fit(m, ctx)?.overall(ctx.gti_accept_unconverged),
            Tpr => cm::tpr(m, class()?),
            Tnr => cm::tnr(m, class()?),
            Ppv => cm::ppv(m, class()?),
            Npv => cm::npv(m, class()?),
            FMeasure => cm::f_measure(m, class()?),
            Jaccard => cm::jaccard(m, class()?),
            Icsi => cm::icsi(m, class()?),
            Kulczynski => cm::kulczynski(m, class()?),
            Mean(kind) => cm::combine(m, class()?, *kind),
            GtiClass => {
                let i = class()?;
                gti::gti_class(cache.fit(m, ctx)?, i, ctx.gti_accept_unconverged)
            }
        }
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.id())
    }
}

impl FromStr for Measure {
    type Err = Error;

    /// Accepts canonical ids plus a few common aliases (`f`, `f1`, `jcc`,
    /// `kappa`, bare mean names such as `harmonic`).
    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        if let Some(m) = Measure::all().into_iter().find(|m| m.id() == lower) {
            return Ok(m);
        }
        if let Ok(kind) = lower.parse::<MeanKind>() {
            return Ok(Measure::Mean(kind));
        }
        let alias = match lower.as_str() {
            "f" | "f1" | "f_score" => Measure::FMeasure,
            "jcc" => Measure::Jaccard,
            "sensitivity" | "recall" => Measure::Tpr,
            "specificity" => Measure::Tnr,
            "precision" => Measure::Ppv,
            "kappa" => Measure::KappaCohen,
            "pi" => Measure::PiScott,
            "mre" => Measure::ReMaxwell,
            _ => return Err(Error::UnknownMeasure(s.to_string())),
        };
        Ok(alias)
    }
}

/// Settings shared by every measure evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasureContext {
    /// External class priors for Scott's π.
    pub scott_priors: Option<Vec<f64>>,
    pub csi_policy: UndefinedPolicy,
    pub gti_tolerance: f64,
    pub gti_max_iterations: usize,
    pub gti_accept_unconverged: bool,
}

impl Default for MeasureContext {
    fn default() -> Self {
        Self {
            scott_priors: None,
            csi_policy: UndefinedPolicy::Fail,
            gti_tolerance: gti::DEFAULT_TOLERANCE,
            gti_max_iterations: gti::DEFAULT_MAX_ITERATIONS,
            gti_accept_unconverged: false,
        }
    }
}

/// Lazily computed GTI fit shared by the overall and per-class entries.
#[derive(Debug, Default)]
pub(crate) struct GtiCache(Option<Result<GtiFit>>);

impl GtiCache {
    pub(crate) fn fit(&mut self, m: &ConfusionMatrix, ctx: &MeasureContext) -> Result<&GtiFit> {
        self.0
            .get_or_insert_with(|| gti::fit_gti(m, ctx.gti_tolerance, ctx.gti_max_iterations))
            .as_ref()
            .map_err(Clone::clone)
    }

    pub(crate) fn result(&self) -> Option<&Result<GtiFit>> {
        self.0.as_ref()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::test_fixtures::{assert_close, m1, m2};

    #[test]
    fn ids_are_unique_and_parse_back() {
        let all = Measure::all();
        let mut ids: Vec<String> = all.iter().map(Measure::id).collect();
        for (m, id) in all.iter().zip(&ids) {
            assert_eq!(id.parse::<Measure>().unwrap(), *m);
        }
        ids.sort();
        ids.dedup();
        assert_eq!(ids.len(), all.len());
    }

    #[test]
    fn aliases() {
        assert_eq!("harmonic".parse::<Measure>().unwrap(), Measure::Mean(MeanKind::Harmonic));
        assert_eq!("F".parse::<Measure>().unwrap(), Measure::FMeasure);
        assert_eq!("jcc".parse::<Measure>().unwrap(), Measure::Jaccard);
        assert!(matches!("nope".parse::<Measure>(), Err(Error::UnknownMeasure(_))));
    }

    #[test]
    fn evaluate_dispatch() {
        let ctx = MeasureContext::default();
        let v = |m: Measure, c| m.evaluate(&m1(), c, &ctx).unwrap().value().unwrap();
        assert_close(v(Measure::Osr, None), 0.85, 1e-15);
        assert_close(v(Measure::ErrorRate, None), 0.15, 1e-15);
        assert_close(v(Measure::KappaCohen, None), 0.7, 1e-12);
        assert_close(v(Measure::FMeasure, Some(0)), 16.0 / 19.0, 1e-15);
        assert!(matches!(
            Measure::Tpr.evaluate(&m1(), None, &ctx),
            Err(Error::InvalidParameter(_))
        ));
        assert_eq!(
            Measure::Gti.evaluate(&m1(), None, &ctx),
            Err(Error::GtiTooFewClasses)
        );
        assert!(Measure::GtiClass.evaluate(&m2(), Some(1), &ctx).unwrap().is_defined());
    }
}

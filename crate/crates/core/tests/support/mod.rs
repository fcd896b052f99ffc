pub mod sipg_assembly;

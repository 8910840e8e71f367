# Unit Tests
# Models, gain surrogates, solver, baselines, config and export

# Integration Tests
# Experiment harnesses and command-line runs end to end

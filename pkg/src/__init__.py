# Exponential Skeletons - Main package

// bench fixtures live here

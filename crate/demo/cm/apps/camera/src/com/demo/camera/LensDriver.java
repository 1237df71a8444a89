package com.demo.camera.lens;

class LensDriver {

    public float focus(float x, float y) {
        float distance = sensor.measureDepth(x, y);
        focusDistance = Math.max(0.1f, distance);
        sensor.moveLens(focusDistance);
        return focusDistance;
    }
}

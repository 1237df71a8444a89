package com.demo.camera;

public class CameraController {
    private Sensor sensor;
    private boolean previewing;
    private float focusDistance;



    public void beginPreview(Surface surface) {
        if (previewing) {
            return;
        }
        sensor.attach(surface);
        sensor.setFrameRate(30);
        previewing = true;
    }

    public void endPreview() {
        if (!previewing) {
            return;
        }
        sensor.detach();
        sensor.setFrameRate(0);
        previewing = false;
    }

    public float focus(float x, float y) {
        float distance = sensor.measureDepth(x, y);
        focusDistance = Math.max(0.1f, distance);
        sensor.moveLens(focusDistance);
        return focusDistance;
    }
}
